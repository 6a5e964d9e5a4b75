//! Per-mode symbols of the impedance operators `D^{δ,k}`, `k = 0..=3`.
//!
//! On the sphere every operator is diagonal on vector spherical harmonics:
//! `grad_Γ div_Γ` has eigenvalue `-λ` on the gradient family and `0` on the
//! curl family, `Rot_Γ rot_Γ` the reverse, with `λ = n(n+1)/R²`.
//!
//! The third-order operator uses the splitting weight `α = 1/2` and the
//! Yosida constant `β = 1`.

use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::blprofiles::{CMat3, SymbolAlgebra};
use crate::error::{Error, Result};
use crate::specfun::SQRT_I;

const Q: f64 = std::f64::consts::SQRT_2 / 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `grad_S Y`: TM-like, `grad_Γ div_Γ = -λ`.
    Gradient,
    /// `grad_S Y × e_r`: TE-like, `Rot_Γ rot_Γ = λ`.
    Curl,
}

impl Family {
    pub const BOTH: [Family; 2] = [Family::Gradient, Family::Curl];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Gradient => "gradient",
            Family::Curl => "curl",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModeIndex {
    pub n: usize,
    pub family: Family,
    pub radius: f64,
}

impl ModeIndex {
    pub fn new(n: usize, family: Family, radius: f64) -> Result<Self> {
        if n == 0 || !(radius > 0.0) {
            return Err(Error::Precondition(format!("mode needs n >= 1 and R > 0 (got n={n}, R={radius})")));
        }
        Ok(Self { n, family, radius })
    }

    pub fn lambda(&self) -> f64 {
        (self.n * (self.n + 1)) as f64 / (self.radius * self.radius)
    }

    /// `(grad_Γ div_Γ, Rot_Γ rot_Γ)` eigenvalues.
    pub fn surface_eigenvalues(&self) -> (f64, f64) {
        match self.family {
            Family::Gradient => (-self.lambda(), 0.0),
            Family::Curl => (0.0, self.lambda()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ImpedanceSymbol {
    pub k: usize,
    pub delta: f64,
    pub mode: ModeIndex,
    #[serde(serialize_with = "ser_complex")]
    pub value: Complex64,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

/// `δ = 1/sqrt(ωσ)`
pub fn skin_depth(omega: f64, sigma: f64) -> Result<f64> {
    if !(omega > 0.0 && sigma > 0.0) || !omega.is_finite() || !sigma.is_finite() {
        return Err(Error::Domain(format!("skin depth needs omega > 0 and sigma > 0 (got {omega}, {sigma})")));
    }
    Ok(1.0 / (omega * sigma).sqrt())
}

/// Physical parameters shared by all symbols.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Medium {
    pub eps_r: f64,
    pub omega: f64,
}

impl Default for Medium {
    fn default() -> Self {
        Self { eps_r: 1.0, omega: 1.0 }
    }
}

/// The five terms of `d_3` on one mode, in the order
/// `δ sqrt(i)/2`, `δ²(h - c)`, `δ³ (c² - h² + ε_r ω²)/(2 sqrt(i))`,
/// the real Yosida term and the imaginary Yosida term.
pub fn d3_terms(delta: f64, mode: &ModeIndex, medium: &Medium) -> [Complex64; 5] {
    let (gd, rr) = mode.surface_eigenvalues();
    let d2 = delta * delta;
    // A: (1 - δ² gd)^{-1}, B: (1 + δ² rr)^{-1}
    let a = 1.0 / (1.0 - d2 * gd);
    let b = 1.0 / (1.0 + d2 * rr);
    let eo2 = medium.eps_r * medium.omega * medium.omega;
    [
        SQRT_I * (delta / 2.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(delta.powi(3) * eo2, 0.0) / (SQRT_I * 2.0),
        Complex64::new(Q * delta * (a + d2 * rr * b), 0.0),
        Complex64::new(0.0, Q * delta * (b - d2 * gd * a)),
    ]
}

/// Scalar symbol of `D^{δ,k}` on a sphere mode. Curvature terms vanish there.
pub fn d_k(k: usize, delta: f64, mode: &ModeIndex, medium: &Medium) -> Result<ImpedanceSymbol> {
    let value = match k {
        0 => Complex64::new(0.0, 0.0),
        1 | 2 => SQRT_I * delta,
        3 => d3_terms(delta, mode, medium).iter().sum(),
        _ => return Err(Error::Order { requested: k, available: 3 }),
    };
    Ok(ImpedanceSymbol { k, delta, mode: *mode, value })
}

/// `D^{δ,k}`, `k <= 2`, at a point with principal curvatures `(c1, c2)`:
/// eigenvalues on `(tau1, tau2)`.
pub fn d_k_tensor(k: usize, delta: f64, c1: f64, c2: f64) -> Result<[Complex64; 2]> {
    let h = 0.5 * (c1 + c2);
    match k {
        0 => Ok([Complex64::new(0.0, 0.0); 2]),
        1 => Ok([SQRT_I * delta; 2]),
        2 => Ok([SQRT_I * delta + delta * delta * (h - c1), SQRT_I * delta + delta * delta * (h - c2)]),
        _ => Err(Error::Order { requested: k, available: 2 }),
    }
}

/// `D_0^{δ,3} = δ sqrt(i) + δ²(H - C) + δ³/(2 sqrt(i)) (C² - H² + ε_r ω² + grad div + Rot rot)`
pub fn d3_unregularized(delta: f64, mode: &ModeIndex, medium: &Medium) -> ImpedanceSymbol {
    let (gd, rr) = mode.surface_eigenvalues();
    let eo2 = medium.eps_r * medium.omega * medium.omega;
    let value = SQRT_I * delta + Complex64::new(delta.powi(3) * (eo2 + gd + rr), 0.0) / (SQRT_I * 2.0);
    ImpedanceSymbol { k: 3, delta, mode: *mode, value }
}

/// `R^{δ,3}` with `D^{δ,3} = D_0^{δ,3} + δ⁵ R^{δ,3}`:
/// `(sqrt(2)/4)(1 - i) [(1 - δ² gd)^{-1} gd² - (1 + δ² rr)^{-1} rr²]`.
pub fn remainder_symbol(delta: f64, mode: &ModeIndex) -> Complex64 {
    let (gd, rr) = mode.surface_eigenvalues();
    let d2 = delta * delta;
    Complex64::new(Q, -Q) * (gd * gd / (1.0 - d2 * gd) - rr * rr / (1.0 + d2 * rr))
}

fn tangential_inverse(m: CMat3) -> Result<CMat3> {
    m.try_inverse().ok_or_else(|| Error::Domain("surface operator resolvent is singular".into()))
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `D^{δ,k}` on a general symbol algebra, as a matrix on `(t1, t2, n)`.
pub fn d_matrix(alg: &SymbolAlgebra, delta: f64, k: usize) -> Result<CMat3> {
    let p = alg.projector();
    let hc = alg.mean() - alg.curvature();
    let d2 = c(delta * delta);
    Ok(match k {
        0 => CMat3::zeros(),
        1 => p * (SQRT_I * delta),
        2 => p * (SQRT_I * delta) + hc * d2,
        3 => {
            let (cm, hm) = (alg.curvature(), alg.mean());
            let (gd, rr) = (alg.graddiv(), alg.rotrot());
            let eo2 = c(alg.eps_r * alg.omega * alg.omega);
            let id = CMat3::identity();
            let a = p * tangential_inverse(id - gd * d2)? * p;
            let b = p * tangential_inverse(id + rr * d2)? * p;
            p * (SQRT_I * (delta / 2.0))
                + hc * d2
                + (cm * cm - hm * hm + p * eo2) * (c(delta.powi(3)) / (SQRT_I * 2.0))
                + (a + rr * b * d2) * c(Q * delta)
                + (b - gd * a * d2) * Complex64::new(0.0, Q * delta)
        }
        _ => return Err(Error::Order { requested: k, available: 3 }),
    })
}

/// `D_0^{δ,3}` on a general symbol algebra.
pub fn d3_unregularized_matrix(alg: &SymbolAlgebra, delta: f64) -> CMat3 {
    let p = alg.projector();
    let hc = alg.mean() - alg.curvature();
    p * (SQRT_I * delta) + hc * c(delta * delta) + crate::blprofiles::q_operator(alg) * (c(delta.powi(3)) / (SQRT_I * 2.0))
}

/// `R^{δ,3}` on a general symbol algebra. No commutation between
/// `grad div` and `Rot rot` is assumed.
pub fn remainder_matrix(alg: &SymbolAlgebra, delta: f64) -> Result<CMat3> {
    let p = alg.projector();
    let (gd, rr) = (alg.graddiv(), alg.rotrot());
    let id = CMat3::identity();
    let d2 = c(delta * delta);
    let a = p * tangential_inverse(id - gd * d2)? * p;
    let b = p * tangential_inverse(id + rr * d2)? * p;
    Ok((gd * gd * a - rr * rr * b) * Complex64::new(Q, -Q))
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub k: usize,
    pub delta: f64,
    pub lambda: f64,
    pub family: Family,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub k: usize,
    /// `sup |d_k| / δ`
    pub c1: f64,
    /// `inf Re d_k / δ`
    pub c2: f64,
    /// Largest scanned δ below which `Re d_k > 0` everywhere; `None` if even the smallest fails.
    pub delta_k: Option<f64>,
    /// `min` over the grid of each of the five `d_3` terms' real parts (k = 3 only).
    pub min_term_re: Option<[f64; 5]>,
    #[serde(skip)]
    pub rows: Vec<ScanRow>,
}

impl ScanReport {
    /// CSV with header `k,delta,lambda,family,re,im`.
    pub fn write_csv<W: Write>(&self, w: W) -> std::io::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["k", "delta", "lambda", "family", "re", "im"])?;
        for r in &self.rows {
            let f = |x: f64| format!("{x:.12e}");
            out.write_record([r.k.to_string(), f(r.delta), f(r.lambda), r.family.as_str().into(), f(r.re), f(r.im)])?;
        }
        out.flush()
    }
}

/// Grid settings for [`coercivity_scan`].
#[derive(Clone, Copy, Debug)]
pub struct ScanGrid {
    pub delta_max: f64,
    pub delta_points: usize,
    pub lambda_max: f64,
    pub lambda_points: usize,
}

impl Default for ScanGrid {
    fn default() -> Self {
        Self { delta_max: 0.3, delta_points: 60, lambda_max: 1e6, lambda_points: 200 }
    }
}

/// Empirical continuity and coercivity constants of `d_k` over a log grid
/// `λ in [2/R², λ_max]` and a uniform grid `δ in (0, δ_max]`.
/// `λ` need not be an exact `n(n+1)/R²`: the symbols are smooth in `λ`.
pub fn coercivity_scan(k: usize, grid: &ScanGrid, medium: &Medium, radius: f64) -> Result<ScanReport> {
    if !(1..=3).contains(&k) {
        return Err(Error::Order { requested: k, available: 3 });
    }
    if grid.lambda_points < 2 || grid.delta_points < 1 || !(grid.delta_max > 0.0) {
        return Err(Error::Config("scan grid needs >= 2 lambda points and >= 1 delta point".into()));
    }
    let lmin = 2.0 / (radius * radius);
    let lmax = grid.lambda_max.max(lmin);
    let ratio = (lmax / lmin).ln() / (grid.lambda_points - 1) as f64;
    let lambdas: Vec<f64> = (0..grid.lambda_points).map(|i| lmin * (ratio * i as f64).exp()).collect();
    let mut c1: f64 = 0.0;
    let mut c2 = f64::INFINITY;
    let mut delta_k = None;
    let mut failed = false;
    let mut min_terms = [f64::INFINITY; 5];
    let mut rows = Vec::with_capacity(grid.delta_points * grid.lambda_points * 2);
    for j in 1..=grid.delta_points {
        let delta = grid.delta_max * j as f64 / grid.delta_points as f64;
        let mut all_positive = true;
        for &lambda in &lambdas {
            for family in Family::BOTH {
                // a fractional degree with the requested eigenvalue
                let mode = ModeIndex { n: 1, family, radius: (2.0 / lambda).sqrt() };
                let sym = d_k(k, delta, &mode, medium)?.value;
                c1 = c1.max(sym.norm() / delta);
                c2 = c2.min(sym.re / delta);
                all_positive &= sym.re > 0.0;
                if k == 3 {
                    for (m, t) in min_terms.iter_mut().zip(d3_terms(delta, &mode, medium)) {
                        *m = m.min(t.re);
                    }
                }
                rows.push(ScanRow { k, delta, lambda, family, re: sym.re, im: sym.im });
            }
        }
        if all_positive && !failed {
            delta_k = Some(delta);
        } else {
            failed = true;
        }
    }
    Ok(ScanReport { k, c1, c2, delta_k, min_term_re: (k == 3).then_some(min_terms), rows })
}
