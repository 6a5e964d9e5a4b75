//! Boundary-layer profiles `p(eta)·exp(-sqrt(i)·eta)` with complex polynomial `p`.
//!
//! Every quantity in the layer recursion lives in this space, so the
//! arithmetic here is exact up to floating-point rounding of the coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::SQRT_I;

pub const MAX_DEGREE: usize = 64;

/// `(sum_j c_j eta^j) * exp(-sqrt(i) eta)`; canonical zero has no coefficients.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PolyExpProfile {
    coeffs: Vec<Complex64>,
}

impl PolyExpProfile {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    /// `c * exp(-sqrt(i) eta)`
    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// `eta^k * exp(-sqrt(i) eta)`
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); k + 1];
        c[k] = Complex64::new(1.0, 0.0);
        Self::new(c)
    }

    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `eta^j`, zero past the degree.
    pub fn coeff(&self, j: usize) -> Complex64 {
        self.coeffs.get(j).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Polynomial degree; `None` for the zero profile.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul_by_eta(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = Vec::with_capacity(self.coeffs.len() + 1);
        c.push(Complex64::new(0.0, 0.0));
        c.extend_from_slice(&self.coeffs);
        Self { coeffs: c }
    }

    /// d/d eta. Keeps the degree: the exponential brings `-sqrt(i) p + p'`.
    pub fn differentiate(&self) -> Self {
        let m = self.coeffs.len();
        let c = (0..m)
            .map(|j| {
                let next = if j + 1 < m { self.coeffs[j + 1] * (j + 1) as f64 } else { Complex64::default() };
                next - SQRT_I * self.coeffs[j]
            })
            .collect();
        Self::new(c)
    }

    pub fn evaluate(&self, eta: f64) -> Complex64 {
        let p = self.coeffs.iter().rev().fold(Complex64::default(), |acc, c| acc * eta + c);
        p * (-SQRT_I * eta).exp()
    }

    /// Value of the polynomial part only.
    pub fn polynomial_at(&self, eta: f64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::default(), |acc, c| acc * eta + c)
    }

    /// Exact `int_0^inf |p|^2 exp(-sqrt(2) eta) d eta` via moments
    /// `int eta^k exp(-sqrt(2) eta) = k! / sqrt(2)^(k+1)`.
    pub fn l2_norm_halfline(&self) -> f64 {
        let m = self.coeffs.len();
        if m == 0 {
            return 0.0;
        }
        let s2 = std::f64::consts::SQRT_2;
        // moment[k] = k!/s2^(k+1)
        let mut moment = vec![1.0 / s2; 2 * m];
        for k in 1..2 * m {
            moment[k] = moment[k - 1] * k as f64 / s2;
        }
        let mut acc = 0.0;
        for a in 0..m {
            for b in 0..m {
                acc += (self.coeffs[a] * self.coeffs[b].conj()).re * moment[a + b];
            }
        }
        acc.max(0.0).sqrt()
    }

    /// Forward operator `(d^2/d eta^2 - i)`. On monomials:
    /// `(d^2 - i)[eta^l e] = e * l * eta^(l-2) * (l - 1 - 2 sqrt(i) eta)`.
    pub fn apply_ode_operator(&self) -> Self {
        let m = self.coeffs.len();
        if m <= 1 {
            return Self::zero();
        }
        let mut out = vec![Complex64::default(); m - 1];
        for (l, c) in self.coeffs.iter().enumerate().skip(1) {
            let lf = l as f64;
            out[l - 1] -= SQRT_I * 2.0 * lf * c;
            if l >= 2 {
                out[l - 2] += c * lf * (lf - 1.0);
            }
        }
        Self::new(out)
    }

    /// Unique decaying solution of `(d^2 - i) u = s`, `u(0) = u0`.
    /// The degree goes up by exactly one unless the source vanishes.
    pub fn solve_layer_ode(source: &Self, u0: Complex64) -> Result<Self> {
        let m = source.coeffs.len();
        if m > MAX_DEGREE {
            return Err(Error::DegreeCap(m));
        }
        let mut u = vec![Complex64::default(); m + 1];
        u[0] = u0;
        // Matching eta^j: s_j = (j+2)(j+1) u_{j+2} - 2 sqrt(i) (j+1) u_{j+1}
        for j in (0..m).rev() {
            let jf = j as f64;
            let upper = if j + 2 <= m { u[j + 2] * (jf + 2.0) * (jf + 1.0) } else { Complex64::default() };
            u[j + 1] = (upper - source.coeffs[j]) / (SQRT_I * 2.0 * (jf + 1.0));
        }
        Ok(Self::new(u))
    }

    /// Largest coefficient-wise deviation, for golden comparisons.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n).map(|j| (self.coeff(j) - other.coeff(j)).norm()).fold(0.0, f64::max)
    }
}

impl Add for &PolyExpProfile {
    type Output = PolyExpProfile;
    fn add(self, rhs: Self) -> PolyExpProfile {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        PolyExpProfile::new((0..n).map(|j| self.coeff(j) + rhs.coeff(j)).collect())
    }
}

impl Sub for &PolyExpProfile {
    type Output = PolyExpProfile;
    fn sub(self, rhs: Self) -> PolyExpProfile {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        PolyExpProfile::new((0..n).map(|j| self.coeff(j) - rhs.coeff(j)).collect())
    }
}

impl Neg for &PolyExpProfile {
    type Output = PolyExpProfile;
    fn neg(self) -> PolyExpProfile {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul<Complex64> for &PolyExpProfile {
    type Output = PolyExpProfile;
    fn mul(self, rhs: Complex64) -> PolyExpProfile {
        self.scale(rhs)
    }
}

impl fmt::Display for PolyExpProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        write!(f, "(")?;
        for (j, c) in self.coeffs.iter().enumerate() {
            if j > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:.10}{:+.10}i)", c.re, c.im)?;
            match j {
                0 => {}
                1 => write!(f, "η")?,
                _ => write!(f, "η^{j}")?,
            }
        }
        write!(f, ")·e^(-√i η)")
    }
}

/// Three profile components. In the surface frame these are `(tau1, tau2, n)`;
/// in modal mode `(gradient, curl, normal)`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ProfileVector(pub [PolyExpProfile; 3]);

impl ProfileVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_vec(v: Vec<PolyExpProfile>) -> Result<Self> {
        let n = v.len();
        let arr: [PolyExpProfile; 3] = v.try_into().map_err(|_| Error::Dimension { expected: 3, got: n })?;
        Ok(Self(arr))
    }

    pub fn tangential(&self) -> Self {
        Self([self.0[0].clone(), self.0[1].clone(), PolyExpProfile::zero()])
    }

    pub fn normal(&self) -> &PolyExpProfile {
        &self.0[2]
    }

    pub fn map(&self, f: impl Fn(&PolyExpProfile) -> PolyExpProfile) -> Self {
        Self([f(&self.0[0]), f(&self.0[1]), f(&self.0[2])])
    }

    pub fn evaluate(&self, eta: f64) -> [Complex64; 3] {
        [self.0[0].evaluate(eta), self.0[1].evaluate(eta), self.0[2].evaluate(eta)]
    }

    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        (0..3).map(|i| self.0[i].max_coeff_diff(&other.0[i])).fold(0.0, f64::max)
    }
}

impl Add for &ProfileVector {
    type Output = ProfileVector;
    fn add(self, rhs: Self) -> ProfileVector {
        ProfileVector([&self.0[0] + &rhs.0[0], &self.0[1] + &rhs.0[1], &self.0[2] + &rhs.0[2]])
    }
}

impl Sub for &ProfileVector {
    type Output = ProfileVector;
    fn sub(self, rhs: Self) -> ProfileVector {
        ProfileVector([&self.0[0] - &rhs.0[0], &self.0[1] - &rhs.0[1], &self.0[2] - &rhs.0[2]])
    }
}
