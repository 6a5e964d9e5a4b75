//! Spherical Bessel, Hankel and Riccati–Bessel functions of complex argument.
//!
//! `j_n` is evaluated by its power series for `|z| < 1` and by Miller's
//! downward recurrence (normalized against `j_0` or `j_1`) otherwise. Upward
//! recurrence loses digits whenever `j_n` is the minimal solution, which
//! happens off the real axis even for `n < |z|`. The Hankel function that
//! decays off the real axis comes from its
//! terminating expansion in `1/z`; the growing one and `y_n` are then
//! recovered from `h^(1,2) = j ± i y` without cancellation.
//!
//! Every evaluation also exists in an exponentially scaled form, returning
//! `f(z)·exp(-|Im z|)`. The interior field of a good conductor has
//! `|Im z|` in the thousands, where the unscaled functions overflow.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `sqrt(i) = (1 + i)/sqrt(2)`, the root with positive real part.
pub const SQRT_I: Complex64 = Complex64::new(
    std::f64::consts::FRAC_1_SQRT_2,
    std::f64::consts::FRAC_1_SQRT_2,
);

/// Largest `|z|` covered by the accuracy guarantees.
pub const VALIDATED_ABS_Z: f64 = 50.0;
/// Largest order covered by the accuracy guarantees.
pub const VALIDATED_ORDER: usize = 30;

/// `|Im z|` above which `exp(|Im z|)` overflows a double.
const OVERFLOW_IM: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselEval {
    pub order: usize,
    pub argument: Complex64,
    pub value: Complex64,
    pub derivative: Complex64,
    /// `false` when the call is outside `|z| <= 50, n <= 30`. The value is
    /// still computed.
    pub validated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HankelKind {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RiccatiKind {
    /// `psi_n(z) = z j_n(z)`
    Psi,
    /// `chi_n(z) = -z y_n(z)`
    Chi,
    /// `xi_n(z) = z h^(1)_n(z)`
    Xi,
}

fn in_validated_range(n: usize, z: Complex64) -> bool {
    n <= VALIDATED_ORDER && z.norm() <= VALIDATED_ABS_Z
}

fn check_finite(z: Complex64) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("non-finite argument {z}")))
    }
}

fn check_unscaled(z: Complex64) -> Result<()> {
    if z.im.abs() > OVERFLOW_IM {
        return Err(Error::Range {
            re: z.re,
            im: z.im,
            reason: "exp(|Im z|) overflows; use the scaled variant",
        });
    }
    Ok(())
}

fn finite_or_range(value: Complex64, z: Complex64) -> Result<Complex64> {
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(Error::Range { re: z.re, im: z.im, reason: "result overflows" })
    }
}

/// `(sin z, cos z)·exp(-|Im z|)`; both factors stay bounded for any `z`.
fn scaled_sin_cos(z: Complex64) -> (Complex64, Complex64) {
    let y = z.im;
    let a = y.abs();
    // e^{iz} e^{-|y|} and e^{-iz} e^{-|y|}
    let ep = Complex64::from_polar((-y - a).exp(), z.re);
    let em = Complex64::from_polar((y - a).exp(), -z.re);
    let sin = (ep - em) / Complex64::new(0.0, 2.0);
    let cos = (ep + em) * 0.5;
    (sin, cos)
}

/// Power series for `j_m(z)`, `m = 0..=nmax`, unscaled. Only used for `|z| < 1`.
fn j_series(nmax: usize, z: Complex64) -> Vec<Complex64> {
    let mz2 = -z * z * 0.5;
    let mut out = Vec::with_capacity(nmax + 1);
    // z^m / (2m+1)!!
    let mut lead = Complex64::new(1.0, 0.0);
    for m in 0..=nmax {
        if m > 0 {
            lead = lead * z / (2 * m + 1) as f64;
        }
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for k in 1..200 {
            term = term * mz2 / (k as f64 * (2 * m + 2 * k + 1) as f64);
            sum += term;
            if term.norm() <= 1e-17 * sum.norm() {
                break;
            }
        }
        out.push(lead * sum);
    }
    out
}

/// `a / b` without squaring `|b|`, which underflows for tiny Miller seeds.
fn safe_div(a: Complex64, b: Complex64) -> Complex64 {
    let r = b.norm();
    (a / r) * (b.conj() / r)
}

/// Scaled `j_m(z)·exp(-|Im z|)` for `m = 0..=nmax`.
fn j_sequence_scaled(nmax: usize, z: Complex64) -> Vec<Complex64> {
    let az = z.norm();
    if az < 1.0 {
        let damp = (-z.im.abs()).exp();
        return j_series(nmax, z).into_iter().map(|v| v * damp).collect();
    }
    let (s, c) = scaled_sin_cos(z);
    let j0 = s / z;
    let j1 = s / (z * z) - c / z;
    let mut out = vec![Complex64::new(0.0, 0.0); nmax + 1];
    out[0] = j0;
    if nmax == 0 {
        return out;
    }
    // Miller: start well above both nmax and |z|, recur downward.
    let start = nmax.max(az.ceil() as usize) + 30 + (4.0 * az.sqrt()).ceil() as usize;
    let mut next = Complex64::new(0.0, 0.0);
    let mut cur = Complex64::new(1.0, 0.0);
    for m in (1..=start).rev() {
        // cur = f_m, next = f_{m+1}; compute f_{m-1}
        let prev = cur * ((2 * m + 1) as f64) / z - next;
        next = cur;
        cur = prev;
        if m - 1 <= nmax {
            out[m - 1] = cur;
        }
        if cur.norm() > 1e250 {
            let s = 1e-250;
            cur *= s;
            next *= s;
            for v in out.iter_mut().take(nmax + 1).skip(m - 1) {
                *v *= s;
            }
        }
    }
    // Normalize against whichever closed form is better conditioned.
    let scale = if j0.norm() >= j1.norm() { safe_div(j0, out[0]) } else { safe_div(j1, out[1]) };
    for v in out.iter_mut() {
        *v *= scale;
    }
    out
}

/// Scaled `h^(1,2)_m(z)·exp(-|Im z|)` for `m = 0..=nmax`, from the terminating
/// expansion `h^(1)_m = (-i)^(m+1) e^(iz)/z sum_k (i/2z)^k (m+k)!/(k!(m-k)!)`.
fn hankel_sequence_scaled(kind: HankelKind, nmax: usize, z: Complex64) -> Vec<Complex64> {
    let sign = match kind {
        HankelKind::First => 1.0,
        HankelKind::Second => -1.0,
    };
    let i = Complex64::new(0.0, sign);
    let a = z.im.abs();
    // e^{±iz} e^{-|Im z|}
    let phase = Complex64::from_polar((-sign * z.im - a).exp(), sign * z.re) / z;
    let w = i / (z * 2.0);
    let mut prefactor = -i;
    (0..=nmax)
        .map(|m| {
            if m > 0 {
                prefactor *= -i;
            }
            let mut coeff = 1.0;
            let mut power = Complex64::new(1.0, 0.0);
            let mut sum = Complex64::new(1.0, 0.0);
            for k in 0..m {
                coeff *= ((m + k + 1) * (m - k)) as f64 / (k + 1) as f64;
                power *= w;
                sum += power * coeff;
            }
            prefactor * phase * sum
        })
        .collect()
}

/// The Hankel function that decays away from the real axis: `h^(2)` below
/// it, `h^(1)` above. Its expansion has no cancellation there.
fn recessive_kind(z: Complex64) -> HankelKind {
    if z.im < 0.0 {
        HankelKind::Second
    } else {
        HankelKind::First
    }
}

/// Scaled Hankel sequence. The dominant kind comes from `2 j - h_rec`, since
/// its own expansion alternates and cancels once `n^2` approaches `|z|`.
fn hankel_scaled_stable(kind: HankelKind, nmax: usize, z: Complex64) -> Vec<Complex64> {
    let rec = hankel_sequence_scaled(recessive_kind(z), nmax, z);
    if kind == recessive_kind(z) {
        return rec;
    }
    let j = j_sequence_scaled(nmax, z);
    j.iter().zip(&rec).map(|(a, b)| a * 2.0 - b).collect()
}

/// Scaled `y_m(z)·exp(-|Im z|)` for `m = 0..=nmax`, from `h^(1,2) = j ± i y`
/// with the recessive Hankel function.
fn y_sequence_scaled(nmax: usize, z: Complex64) -> Vec<Complex64> {
    let kind = recessive_kind(z);
    let rec = hankel_sequence_scaled(kind, nmax, z);
    let j = j_sequence_scaled(nmax, z);
    let i = Complex64::new(0.0, 1.0);
    j.iter()
        .zip(&rec)
        .map(|(a, h)| match kind {
            HankelKind::First => (h - a) / i,
            HankelKind::Second => (a - h) / i,
        })
        .collect()
}

/// Value and derivative from a sequence holding orders `0..=n+1`.
fn value_and_derivative(seq: &[Complex64], n: usize) -> (Complex64, Complex64) {
    let v = seq[n];
    let d = if n == 0 {
        -seq[1]
    } else {
        // three-term form; avoids dividing by a tiny z
        (seq[n - 1] * n as f64 - seq[n + 1] * (n + 1) as f64) / (2 * n + 1) as f64
    };
    (v, d)
}

fn j_at_origin(n: usize) -> BesselEval {
    let zero = Complex64::new(0.0, 0.0);
    let value = if n == 0 { Complex64::new(1.0, 0.0) } else { zero };
    let derivative = if n == 1 { Complex64::new(1.0 / 3.0, 0.0) } else { zero };
    BesselEval { order: n, argument: zero, value, derivative, validated: true }
}

/// `j_n(z)·exp(-|Im z|)` and its derivative, scaled by the same factor.
pub fn spherical_j_scaled(n: usize, z: Complex64) -> Result<BesselEval> {
    check_finite(z)?;
    if z.norm() == 0.0 {
        return Ok(j_at_origin(n));
    }
    let seq = j_sequence_scaled(n + 1, z);
    let (value, derivative) = value_and_derivative(&seq, n);
    Ok(BesselEval {
        order: n,
        argument: z,
        value: finite_or_range(value, z)?,
        derivative: finite_or_range(derivative, z)?,
        validated: in_validated_range(n, z),
    })
}

/// `y_n(z)·exp(-|Im z|)` and its derivative, scaled by the same factor.
pub fn spherical_y_scaled(n: usize, z: Complex64) -> Result<BesselEval> {
    check_finite(z)?;
    if z.norm() == 0.0 {
        return Err(Error::Domain("y_n is singular at z = 0".into()));
    }
    let seq = y_sequence_scaled(n + 1, z);
    let (value, derivative) = value_and_derivative(&seq, n);
    Ok(BesselEval {
        order: n,
        argument: z,
        value: finite_or_range(value, z)?,
        derivative: finite_or_range(derivative, z)?,
        validated: in_validated_range(n, z),
    })
}

fn unscale(mut e: BesselEval) -> Result<BesselEval> {
    let z = e.argument;
    check_unscaled(z)?;
    let f = z.im.abs().exp();
    e.value = finite_or_range(e.value * f, z)?;
    e.derivative = finite_or_range(e.derivative * f, z)?;
    Ok(e)
}

/// Spherical Bessel function of the first kind `j_n(z)` and `j_n'(z)`.
pub fn spherical_j(n: usize, z: Complex64) -> Result<BesselEval> {
    check_finite(z)?;
    check_unscaled(z)?;
    unscale(spherical_j_scaled(n, z)?)
}

/// Spherical Bessel function of the second kind `y_n(z)` and `y_n'(z)`.
pub fn spherical_y(n: usize, z: Complex64) -> Result<BesselEval> {
    check_finite(z)?;
    check_unscaled(z)?;
    unscale(spherical_y_scaled(n, z)?)
}

/// `h_n^(1,2)(z)·exp(-|Im z|)` and its derivative, scaled by the same factor.
pub fn spherical_h_scaled(kind: HankelKind, n: usize, z: Complex64) -> Result<BesselEval> {
    check_finite(z)?;
    if z.norm() == 0.0 {
        return Err(Error::Domain("h_n is singular at z = 0".into()));
    }
    let seq = hankel_scaled_stable(kind, n + 1, z);
    let (value, derivative) = value_and_derivative(&seq, n);
    Ok(BesselEval {
        order: n,
        argument: z,
        value: finite_or_range(value, z)?,
        derivative: finite_or_range(derivative, z)?,
        validated: in_validated_range(n, z),
    })
}

/// Spherical Hankel functions `h_n^(1,2) = j_n ± i y_n`.
pub fn spherical_h(kind: HankelKind, n: usize, z: Complex64) -> Result<BesselEval> {
    check_finite(z)?;
    check_unscaled(z)?;
    unscale(spherical_h_scaled(kind, n, z)?)
}

/// Riccati–Bessel functions `psi_n`, `chi_n`, `xi_n` and their derivatives.
pub fn riccati(kind: RiccatiKind, n: usize, z: Complex64) -> Result<BesselEval> {
    let (base, sign) = match kind {
        RiccatiKind::Psi => (spherical_j(n, z)?, 1.0),
        RiccatiKind::Chi => (spherical_y(n, z)?, -1.0),
        RiccatiKind::Xi => (spherical_h(HankelKind::First, n, z)?, 1.0),
    };
    Ok(BesselEval {
        order: n,
        argument: z,
        value: z * base.value * sign,
        derivative: (base.value + z * base.derivative) * sign,
        validated: base.validated,
    })
}
