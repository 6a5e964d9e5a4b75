//! Concentric-sphere transmission problem, one vector spherical harmonic at a time.
//!
//! A conducting ball `r < R` sits inside the shell `R < r < R_out`, which is
//! closed by the absorbing condition `E_T - H × e_r = g`. Units have
//! `μ = ε_0 = 1`, so the exterior wavenumber is `ω` and the interior one
//! `k_i = sqrt(ε_r ω² - i/δ²)` with `Im k_i < 0`.
//!
//! Fields are stored as coefficients on `(∇_S Y, ∇_S Y × e_r, Y e_r)` for a
//! unit-normalized scalar harmonic `Y` of degree `n`. With `z = z_n(κ r)` and
//! `P = ψ_n'(κ r)/(κ r)`, `q = κ/ω`, `L = n(n+1)`:
//!
//! | polarization | `E`                      | `H`                          |
//! |--------------|--------------------------|------------------------------|
//! | TE_r         | `(0, z, 0)`              | `(i q P, 0, i L z/(ω r))`    |
//! | TM_r         | `(P, 0, L z/(κ r))`      | `(0, i q z, 0)`              |
//!
//! On `Γ` the normal `n = -e_r` points into the ball, so
//! `E × n = (E_K, -E_G)` in the same coordinates as
//! [`SymbolAlgebra::sphere`](crate::blprofiles::SymbolAlgebra::sphere).

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::blprofiles::{self, CVec3, SymbolAlgebra, Traces};
use crate::error::{Error, Result};
use crate::gibc_symbols::{self, Family, Medium, ModeIndex};
use crate::quadrature::{Rule, DEFAULT_NODES};
use crate::specfun::{spherical_j, spherical_j_scaled, spherical_y, BesselEval};

/// Condition numbers above this flag a near-resonant exact solve.
pub const RESONANCE_CONDITION: f64 = 1e12;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarization {
    /// `E_r = 0`: `E_T` on the curl family, `H_T` on the gradient family.
    #[serde(rename = "TE_r")]
    Te,
    /// `H_r = 0`: `E_T` on the gradient family, `H_T` on the curl family.
    #[serde(rename = "TM_r")]
    Tm,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::Te, Polarization::Tm];

    pub fn as_str(self) -> &'static str {
        match self {
            Polarization::Te => "TE_r",
            Polarization::Tm => "TM_r",
        }
    }

    /// Family carrying `H_T`, on which the impedance operator acts.
    pub fn impedance_family(self) -> Family {
        match self {
            Polarization::Te => Family::Gradient,
            Polarization::Tm => Family::Curl,
        }
    }

    /// Index of the nonzero coordinate of `H_T` and of `E × n`.
    fn h_index(self) -> usize {
        match self {
            Polarization::Te => 0,
            Polarization::Tm => 1,
        }
    }
}

impl std::str::FromStr for Polarization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "te" | "te_r" => Ok(Polarization::Te),
            "tm" | "tm_r" => Ok(Polarization::Tm),
            _ => Err(Error::Config(format!("unknown polarization {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProblemConfig {
    pub radius: f64,
    pub radius_out: f64,
    pub omega: f64,
    pub eps_r: f64,
    pub delta: f64,
}

impl Default for ProblemConfig {
    fn default() -> Self {
        Self { radius: 1.0, radius_out: 2.0, omega: 1.0, eps_r: 1.0, delta: 0.08 }
    }
}

impl ProblemConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !(ok(self.radius) && ok(self.radius_out) && self.radius < self.radius_out) {
            return Err(Error::Config(format!("need 0 < R < R_out (got {}, {})", self.radius, self.radius_out)));
        }
        if !(ok(self.omega) && ok(self.eps_r) && ok(self.delta)) {
            return Err(Error::Config("omega, eps_r and delta must be positive".into()));
        }
        Ok(())
    }

    pub fn with_delta(&self, delta: f64) -> Self {
        Self { delta, ..*self }
    }

    /// `k_i`, principal root of `ε_r ω² - i/δ²`.
    pub fn k_interior(&self) -> Complex64 {
        Complex64::new(self.eps_r * self.omega * self.omega, -1.0 / (self.delta * self.delta)).sqrt()
    }

    pub fn medium(&self) -> Medium {
        Medium { eps_r: self.eps_r, omega: self.omega }
    }
}

/// Field coefficients at one radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldSample {
    pub e: [Complex64; 3],
    pub h: [Complex64; 3],
}

impl FieldSample {
    fn zero() -> Self {
        Self { e: [c(0.0); 3], h: [c(0.0); 3] }
    }

    fn axpy(&self, a: Complex64, other: &Self) -> Self {
        let mut out = *self;
        for i in 0..3 {
            out.e[i] += a * other.e[i];
            out.h[i] += a * other.h[i];
        }
        out
    }

    /// `E × n` with `n = -e_r`, in algebra coordinates.
    pub fn e_cross_n(&self) -> CVec3 {
        CVec3::new(self.e[1], -self.e[0], c(0.0))
    }

    /// `H_T` in algebra coordinates.
    pub fn h_tangential(&self) -> [Complex64; 2] {
        [self.h[0], self.h[1]]
    }

    /// `E_T - H × e_r`
    fn outer_data(&self) -> [Complex64; 2] {
        [self.e[0] + self.h[1], self.e[1] - self.h[0]]
    }

    /// Pointwise `|E|² + ω²|H|²` with the harmonic's angular weights.
    fn hcurl_density(&self, n: usize, omega: f64) -> f64 {
        let l = (n * (n + 1)) as f64;
        let w = [l, l, 1.0];
        (0..3).map(|i| w[i] * (self.e[i].norm_sqr() + omega * omega * self.h[i].norm_sqr())).sum()
    }

    fn l2_density(&self, n: usize) -> f64 {
        let l = (n * (n + 1)) as f64;
        l * (self.e[0].norm_sqr() + self.e[1].norm_sqr()) + self.e[2].norm_sqr()
    }
}

/// `(z, ψ'/(κ r))` from a Bessel evaluation at `κ r`.
fn radial_pair(b: &BesselEval) -> (Complex64, Complex64) {
    (b.value, b.value / b.argument + b.derivative)
}

fn assemble(pol: Polarization, n: usize, omega: f64, kappa: Complex64, r: f64, z: Complex64, p: Complex64) -> FieldSample {
    let q = kappa / omega;
    let l = c((n * (n + 1)) as f64);
    match pol {
        Polarization::Te => FieldSample { e: [c(0.0), z, c(0.0)], h: [I * q * p, c(0.0), I * l * z / (omega * r)] },
        Polarization::Tm => FieldSample { e: [p, c(0.0), l * z / (kappa * r)], h: [c(0.0), I * q * z, c(0.0)] },
    }
}

/// Exterior fields of the `j_n` and `y_n` solutions at `r`.
fn exterior_basis(cfg: &ProblemConfig, n: usize, pol: Polarization, r: f64) -> Result<[FieldSample; 2]> {
    let x = c(cfg.omega * r);
    let (zj, pj) = radial_pair(&spherical_j(n, x)?);
    let (zy, py) = radial_pair(&spherical_y(n, x)?);
    Ok([
        assemble(pol, n, cfg.omega, c(cfg.omega), r, zj, pj),
        assemble(pol, n, cfg.omega, c(cfg.omega), r, zy, py),
    ])
}

/// Interior field of `j_n(k_i r)·exp(-|Im k_i| R)`.
fn interior_basis(cfg: &ProblemConfig, n: usize, pol: Polarization, r: f64) -> Result<FieldSample> {
    let k = cfg.k_interior();
    let b = spherical_j_scaled(n, k * r)?;
    let factor = (k.im.abs() * (r - cfg.radius)).exp();
    let (z, p) = radial_pair(&b);
    Ok(assemble(pol, n, cfg.omega, k, r, z * factor, p * factor))
}

/// Modal coefficients of one solve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModalSolution {
    pub n: usize,
    pub polarization: Polarization,
    #[serde(skip)]
    pub config: ProblemConfig,
    /// Exterior coefficient on `j_n(ω r)`.
    #[serde(serialize_with = "ser_complex")]
    pub alpha: Complex64,
    /// Exterior coefficient on `y_n(ω r)`.
    #[serde(serialize_with = "ser_complex")]
    pub beta: Complex64,
    /// Interior coefficient on `j_n(k_i r)·exp(-|Im k_i| R)`; `None` for exterior-only solves.
    #[serde(serialize_with = "ser_opt_complex")]
    pub gamma: Option<Complex64>,
    pub condition: f64,
    pub near_resonance: bool,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

fn ser_opt_complex<S: serde::Serializer>(z: &Option<Complex64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    z.map(|z| [z.re, z.im]).serialize(s)
}

impl ModalSolution {
    pub fn exterior_coefficients(&self) -> Vector2<Complex64> {
        Vector2::new(self.alpha, self.beta)
    }

    pub fn exterior_field(&self, r: f64) -> Result<FieldSample> {
        let [bj, by] = exterior_basis(&self.config, self.n, self.polarization, r)?;
        Ok(FieldSample::zero().axpy(self.alpha, &bj).axpy(self.beta, &by))
    }

    pub fn interior_field(&self, r: f64) -> Result<FieldSample> {
        let gamma = self.gamma.ok_or_else(|| Error::Precondition("exterior-only solution has no interior field".into()))?;
        Ok(FieldSample::zero().axpy(gamma, &interior_basis(&self.config, self.n, self.polarization, r)?))
    }

    /// Interior field for `r < R`, exterior otherwise.
    pub fn field(&self, r: f64) -> Result<FieldSample> {
        if r < self.config.radius && self.gamma.is_some() {
            self.interior_field(r)
        } else {
            self.exterior_field(r)
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        let (a, b) = (&self.config, &other.config);
        if self.n != other.n || self.polarization != other.polarization || (a.radius, a.radius_out, a.omega) != (b.radius, b.radius_out, b.omega) {
            return Err(Error::Precondition("solutions belong to different modes or domains".into()));
        }
        Ok(())
    }
}

/// `σ_max / σ_min` from singular values.
fn condition_number<'a>(s: impl Iterator<Item = &'a f64>) -> f64 {
    let (lo, hi) = s.fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    if lo == 0.0 { f64::INFINITY } else { hi / lo }
}

fn singular(n: usize, pol: Polarization, delta: f64) -> Error {
    Error::Singular { n, family: pol.as_str(), delta }
}

fn assemble_exact(cfg: &ProblemConfig, n: usize, pol: Polarization, swap_rows: bool) -> Result<ModalSolution> {
    cfg.validate()?;
    let [bj, by] = exterior_basis(cfg, n, pol, cfg.radius)?;
    let bi = interior_basis(cfg, n, pol, cfg.radius)?;
    let [oj, oy] = exterior_basis(cfg, n, pol, cfg.radius_out)?;
    let (ie, ih) = (1 - pol.h_index(), pol.h_index());
    let e_row = [bj.e[ie], by.e[ie], -bi.e[ie]];
    let h_row = [bj.h[ih], by.h[ih], -bi.h[ih]];
    let (r0, r1) = if swap_rows { (h_row, e_row) } else { (e_row, h_row) };
    let r2 = [oj.outer_data()[ie], oy.outer_data()[ie], c(0.0)];
    let m = Matrix3::new(r0[0], r0[1], r0[2], r1[0], r1[1], r1[2], r2[0], r2[1], r2[2]);
    let condition = condition_number(m.svd(false, false).singular_values.iter());
    let x = m.lu().solve(&Vector3::new(c(0.0), c(0.0), c(1.0))).ok_or_else(|| singular(n, pol, cfg.delta))?;
    Ok(ModalSolution {
        n,
        polarization: pol,
        config: *cfg,
        alpha: x[0],
        beta: x[1],
        gamma: Some(x[2]),
        condition,
        near_resonance: condition > RESONANCE_CONDITION,
    })
}

/// Transmission solve with unit modal data at `R_out`: tangential `E` and
/// `H` continuous at `R`, one absorbing condition at `R_out`.
pub fn solve_exact(cfg: &ProblemConfig, n: usize, pol: Polarization) -> Result<ModalSolution> {
    assemble_exact(cfg, n, pol, false)
}

/// Exterior solve with `(E × n)` component `inner` at `R` (on the `H_T`
/// coordinate) plus `impedance·ω·H_T`, and modal data `outer` at `R_out`.
fn solve_exterior(cfg: &ProblemConfig, n: usize, pol: Polarization, impedance: Complex64, inner: Complex64, outer: Complex64) -> Result<ModalSolution> {
    cfg.validate()?;
    let i = pol.h_index();
    let bdry = exterior_basis(cfg, n, pol, cfg.radius)?;
    let far = exterior_basis(cfg, n, pol, cfg.radius_out)?;
    let row = |b: &FieldSample| b.e_cross_n()[i] + impedance * cfg.omega * b.h[i];
    let m = Matrix2::new(row(&bdry[0]), row(&bdry[1]), far[0].outer_data()[1 - i], far[1].outer_data()[1 - i]);
    let condition = condition_number(m.svd(false, false).singular_values.iter());
    let x = m.lu().solve(&Vector2::new(inner, outer)).ok_or_else(|| singular(n, pol, cfg.delta))?;
    if !x.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        return Err(singular(n, pol, cfg.delta));
    }
    Ok(ModalSolution {
        n,
        polarization: pol,
        config: *cfg,
        alpha: x[0],
        beta: x[1],
        gamma: None,
        condition,
        near_resonance: condition > RESONANCE_CONDITION,
    })
}

/// Perfect conductor: `E × n = 0` at `R`.
pub fn solve_pec(cfg: &ProblemConfig, n: usize, pol: Polarization) -> Result<ModalSolution> {
    solve_exterior(cfg, n, pol, c(0.0), c(0.0), c(1.0))
}

/// Exterior solve with `E × n + ω D^{δ,k}(H_T) = 0` at `R`.
pub fn solve_gibc(cfg: &ProblemConfig, n: usize, pol: Polarization, k: usize) -> Result<ModalSolution> {
    cfg.validate()?;
    let mode = ModeIndex::new(n, pol.impedance_family(), cfg.radius)?;
    let d = gibc_symbols::d_k(k, cfg.delta, &mode, &cfg.medium())?.value;
    solve_exterior(cfg, n, pol, d, c(0.0), c(1.0))
}

/// Exterior terms `E_e^ℓ`, `ℓ = 0..=k`, of the skin-depth expansion.
/// They do not depend on `δ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Expansion {
    pub terms: Vec<ModalSolution>,
    /// `H_{e,T}^ℓ` at `R` in algebra coordinates.
    pub traces: Traces,
}

impl Expansion {
    /// Coefficients of `Σ_{ℓ<=k} δ^ℓ E_e^ℓ`.
    pub fn truncated(&self, delta: f64, k: usize) -> Vector2<Complex64> {
        self.terms.iter().take(k + 1).enumerate().fold(Vector2::zeros(), |acc, (l, t)| acc + t.exterior_coefficients() * c(delta.powi(l as i32)))
    }
}

/// Order 0 is the perfect conductor with data `g`; order `ℓ >= 1` has zero
/// outer data and `E_e^ℓ × n` equal to the layer trace of order `ℓ`.
pub fn expansion_terms(cfg: &ProblemConfig, n: usize, pol: Polarization, k: usize) -> Result<Expansion> {
    if k > 3 {
        return Err(Error::Order { requested: k, available: 3 });
    }
    let alg = SymbolAlgebra::sphere(n, cfg.radius, cfg.omega, cfg.eps_r)?;
    let pec = solve_pec(cfg, n, pol)?;
    let mut traces: Traces = vec![pec.exterior_field(cfg.radius)?.h_tangential()];
    let mut terms = vec![pec];
    for l in 1..=k {
        let state = blprofiles::run_recursion(&alg, &traces, l - 1)?;
        let t = blprofiles::trace_ek_cross_n(&state, l)?;
        let term = solve_exterior(cfg, n, pol, c(0.0), t[pol.h_index()], c(0.0))?;
        traces.push(term.exterior_field(cfg.radius)?.h_tangential());
        terms.push(term);
    }
    Ok(Expansion { terms, traces })
}

/// Relative residual of `Ẽ_k × n + ω D^{δ,k}(H̃_k)_T - δ^(k+1) φ_k` at `R`,
/// with `Ẽ_k`, `H̃_k` the order-`k` truncations of the exterior expansion.
pub fn trace_identity_residual(cfg: &ProblemConfig, n: usize, pol: Polarization, k: usize) -> Result<f64> {
    let exp = expansion_terms(cfg, n, pol, k)?;
    let alg = SymbolAlgebra::sphere(n, cfg.radius, cfg.omega, cfg.eps_r)?;
    let delta = cfg.delta;
    let mut e_sum = CVec3::zeros();
    let mut h_sum = CVec3::zeros();
    for (l, term) in exp.terms.iter().enumerate() {
        let w = c(delta.powi(l as i32));
        e_sum += term.exterior_field(cfg.radius)?.e_cross_n() * w;
        h_sum += blprofiles::trace_vec(exp.traces[l]) * w;
    }
    let dh = gibc_symbols::d_matrix(&alg, delta, k)? * h_sum * c(cfg.omega);
    let rhs = blprofiles::phi_k(&alg, &exp.traces, delta, k)? * c(delta.powi(k as i32 + 1));
    let scale = e_sum.norm().max(dh.norm()).max(cfg.omega * delta * h_sum.norm());
    Ok(if scale == 0.0 { 0.0 } else { (e_sum + dh - rhs).norm() / scale })
}

/// Exterior `H(curl)` norm as a Hermitian form on `(α, β)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HcurlGram {
    pub gram: Matrix2<Complex64>,
}

impl HcurlGram {
    /// Gauss–Legendre with `nodes` points on `R < r < R_out`.
    pub fn new(cfg: &ProblemConfig, n: usize, pol: Polarization, nodes: usize) -> Result<Self> {
        let rule = Rule::gauss_legendre(nodes, cfg.radius, cfg.radius_out);
        let l = (n * (n + 1)) as f64;
        let w = [l, l, 1.0];
        let mut gram = Matrix2::zeros();
        for (&r, &wq) in rule.nodes.iter().zip(&rule.weights) {
            let b = exterior_basis(cfg, n, pol, r)?;
            for a in 0..2 {
                for bb in 0..2 {
                    let mut s = c(0.0);
                    for i in 0..3 {
                        s += w[i] * (b[a].e[i].conj() * b[bb].e[i] + cfg.omega * cfg.omega * b[a].h[i].conj() * b[bb].h[i]);
                    }
                    gram[(a, bb)] += s * (wq * r * r);
                }
            }
        }
        Ok(Self { gram })
    }

    pub fn norm(&self, coeffs: &Vector2<Complex64>) -> f64 {
        (coeffs.adjoint() * self.gram * coeffs)[(0, 0)].re.max(0.0).sqrt()
    }
}

/// `‖E_a - E_b‖_{H(curl, Ω_e)}` for two solutions of the same mode.
pub fn hcurl_error(a: &ModalSolution, b: &ModalSolution) -> Result<f64> {
    a.check_compatible(b)?;
    let g = HcurlGram::new(&a.config, a.n, a.polarization, DEFAULT_NODES)?;
    Ok(g.norm(&(a.exterior_coefficients() - b.exterior_coefficients())))
}

/// Interior `(‖E‖_{L²(Ω_i)}, ‖E‖_{H(curl, Ω_i)})` on panels graded toward `R`.
pub fn interior_norms(sol: &ModalSolution) -> Result<(f64, f64)> {
    let cfg = &sol.config;
    let rule = Rule::graded_toward(32, 0.0, cfg.radius, cfg.delta);
    let (mut l2, mut hc) = (0.0, 0.0);
    for (&r, &w) in rule.nodes.iter().zip(&rule.weights) {
        let f = sol.interior_field(r)?;
        l2 += w * r * r * f.l2_density(sol.n);
        hc += w * r * r * f.hcurl_density(sol.n, cfg.omega);
    }
    Ok((l2.sqrt(), hc.sqrt()))
}

/// Exterior `‖E‖_{H(curl, Ω_e)}` by direct quadrature.
pub fn exterior_hcurl_norm(sol: &ModalSolution, nodes: usize) -> Result<f64> {
    let cfg = &sol.config;
    let rule = Rule::gauss_legendre(nodes, cfg.radius, cfg.radius_out);
    let mut acc = 0.0;
    for (&r, &w) in rule.nodes.iter().zip(&rule.weights) {
        acc += w * r * r * sol.exterior_field(r)?.hcurl_density(sol.n, cfg.omega);
    }
    Ok(acc.sqrt())
}

/// Largest relative residual of Faraday's and Ampère's laws at `r`, with
/// radial derivatives from `ψ_n' = (n+1) z_n - ρ z_{n+1}` and
/// `ψ_n'' = (L/ρ² - 1) ψ_n`.
pub fn maxwell_residual(sol: &ModalSolution, r: f64) -> Result<f64> {
    let cfg = &sol.config;
    let (n, pol) = (sol.n, sol.polarization);
    let l = (n * (n + 1)) as f64;
    let interior = r < cfg.radius && sol.gamma.is_some();
    let kappa = if interior { cfg.k_interior() } else { c(cfg.omega) };
    let rho = kappa * r;
    // z_n, z_{n+1} at ρ and the coefficient in front of them
    let (zn, zn1) = if interior {
        let f = (kappa.im.abs() * (r - cfg.radius)).exp() * sol.gamma.unwrap();
        (spherical_j_scaled(n, rho)?.value * f, spherical_j_scaled(n + 1, rho)?.value * f)
    } else {
        let (j0, j1) = (spherical_j(n, rho)?.value, spherical_j(n + 1, rho)?.value);
        let (y0, y1) = (spherical_y(n, rho)?.value, spherical_y(n + 1, rho)?.value);
        (sol.alpha * j0 + sol.beta * y0, sol.alpha * j1 + sol.beta * y1)
    };
    // (r z)' = ψ'(ρ), (r P)' = ψ''(ρ)
    let d_rz = zn * c(n as f64 + 1.0) - rho * zn1;
    let d_rp = (c(l) / (rho * rho) - 1.0) * rho * zn;
    let f = sol.field(r)?;
    let (w, q) = (cfg.omega, kappa / cfg.omega);
    let ampere = I * kappa * kappa / w;
    let (faraday, ampere_res) = match pol {
        Polarization::Te => {
            // curl E = ((rE_K)'/r, 0, L E_K/r); curl H = (0, (H_R - (r H_G)')/r, 0)
            let far = (I * w * f.h[0] + d_rz / r).norm().max((I * w * f.h[2] + l * f.e[1] / r).norm());
            let curl_h = (f.h[2] - I * q * d_rp) / r;
            (far, (ampere * f.e[1] - curl_h).norm())
        }
        Polarization::Tm => {
            // curl E = (0, (E_R - (r E_G)')/r, 0); curl H = ((r H_K)'/r, 0, L H_K/r)
            let far = (I * w * f.h[1] + (f.e[2] - d_rp) / r).norm();
            let amp = (ampere * f.e[0] - I * q * d_rz / r).norm().max((ampere * f.e[2] - l * f.h[1] / r).norm());
            (far, amp)
        }
    };
    let scale = kappa.norm().max(1.0) * (f.e.iter().chain(&f.h).map(|z| z.norm()).fold(0.0, f64::max)).max(f64::MIN_POSITIVE);
    Ok(faraday.max(ampere_res) / scale)
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let m = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x.ln(), b + y.ln()));
    let (mx, my) = (sx / m, sy / m);
    let (num, den) = points.iter().fold((0.0, 0.0), |(nu, de), &(x, y)| {
        let dx = x.ln() - mx;
        (nu + dx * (y.ln() - my), de + dx * dx)
    });
    num / den
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StudyKind {
    /// Exact solution against the order-`k` impedance solution.
    Gibc,
    /// Exact solution against `Σ_{ℓ<=k} δ^ℓ E_e^ℓ`.
    Truncation,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatePoint {
    pub delta: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateReport {
    pub k: usize,
    pub kind: StudyKind,
    pub points: Vec<RatePoint>,
    pub slope: f64,
    pub modes: Vec<usize>,
    pub polarizations: Vec<Polarization>,
    pub excitation: String,
    pub max_condition: f64,
    pub near_resonance: bool,
}

fn validate_sweep(deltas: &[f64], modes: &[usize], pols: &[Polarization]) -> Result<()> {
    if deltas.len() < 4 {
        return Err(Error::Config(format!("a rate study needs at least 4 delta values (got {})", deltas.len())));
    }
    if deltas.windows(2).any(|w| !(w[1] < w[0])) || deltas.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::Config("delta values must be positive and strictly decreasing".into()));
    }
    if modes.is_empty() || modes.contains(&0) || pols.is_empty() {
        return Err(Error::Config("mode set must be nonempty with n >= 1".into()));
    }
    Ok(())
}

fn with_context<T>(r: Result<T>, n: usize, pol: Polarization, delta: f64, k: usize) -> Result<T> {
    r.map_err(|e| Error::Solve { n, polarization: pol.as_str(), delta, k, source: Box::new(e) })
}

/// Errors summed over modes as `sqrt(Σ ‖·‖²)`, one point per `δ`, and the
/// fitted log-log slope.
pub fn rate_study(base: &ProblemConfig, k: usize, deltas: &[f64], modes: &[usize], pols: &[Polarization], kind: StudyKind) -> Result<RateReport> {
    base.validate()?;
    validate_sweep(deltas, modes, pols)?;
    let mut acc = vec![0.0; deltas.len()];
    let mut max_condition: f64 = 0.0;
    for &n in modes {
        for &pol in pols {
            let gram = with_context(HcurlGram::new(base, n, pol, DEFAULT_NODES), n, pol, base.delta, k)?;
            let expansion = match kind {
                StudyKind::Truncation => Some(with_context(expansion_terms(base, n, pol, k), n, pol, base.delta, k)?),
                StudyKind::Gibc => None,
            };
            for (slot, &delta) in acc.iter_mut().zip(deltas) {
                let cfg = base.with_delta(delta);
                let exact = with_context(solve_exact(&cfg, n, pol), n, pol, delta, k)?;
                max_condition = max_condition.max(exact.condition);
                let approx = match &expansion {
                    Some(e) => e.truncated(delta, k),
                    None => {
                        let g = with_context(solve_gibc(&cfg, n, pol, k), n, pol, delta, k)?;
                        max_condition = max_condition.max(g.condition);
                        g.exterior_coefficients()
                    }
                };
                *slot += gram.norm(&(exact.exterior_coefficients() - approx)).powi(2);
            }
        }
    }
    let points: Vec<RatePoint> = deltas.iter().zip(&acc).map(|(&delta, &e2)| RatePoint { delta, error: e2.sqrt() }).collect();
    let slope = loglog_slope(&points.iter().map(|p| (p.delta, p.error)).collect::<Vec<_>>());
    Ok(RateReport {
        k,
        kind,
        points,
        slope,
        modes: modes.to_vec(),
        polarizations: pols.to_vec(),
        excitation: format!("unit modal data at R_out={} for every listed mode", base.radius_out),
        max_condition,
        near_resonance: max_condition > RESONANCE_CONDITION,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StabilityPoint {
    pub delta: f64,
    /// `‖E‖_{H(curl, Ω)}`
    pub hcurl_total: f64,
    /// `‖E‖_{L²(Ω_i)} / δ`
    pub interior_l2_over_delta: f64,
}

/// Norms of the exact field at fixed unit data, summed over modes.
pub fn stability_sweep(base: &ProblemConfig, deltas: &[f64], modes: &[usize], pols: &[Polarization]) -> Result<Vec<StabilityPoint>> {
    base.validate()?;
    deltas
        .iter()
        .map(|&delta| {
            let cfg = base.with_delta(delta);
            let (mut total, mut inner) = (0.0, 0.0);
            for &n in modes {
                for &pol in pols {
                    let sol = with_context(solve_exact(&cfg, n, pol), n, pol, delta, 0)?;
                    let (l2, hc) = with_context(interior_norms(&sol), n, pol, delta, 0)?;
                    let ext = with_context(exterior_hcurl_norm(&sol, DEFAULT_NODES), n, pol, delta, 0)?;
                    total += ext * ext + hc * hc;
                    inner += l2 * l2;
                }
            }
            Ok(StabilityPoint { delta, hcurl_total: total.sqrt(), interior_l2_over_delta: inner.sqrt() / delta })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    pub delta: f64,
    pub measured_rate: f64,
    /// `1/(sqrt(2) δ)`
    pub expected_rate: f64,
    pub relative_error: f64,
    pub depths: Vec<f64>,
    pub log_amplitude: Vec<f64>,
}

/// Fits `log|E_T(R - d)|` against the depth `d` on `[0, depth_max]`.
pub fn interior_decay(cfg: &ProblemConfig, n: usize, pol: Polarization, depth_max: f64, samples: usize) -> Result<DecayFit> {
    if samples < 2 || !(depth_max > 0.0 && depth_max < cfg.radius) {
        return Err(Error::Config("decay fit needs >= 2 samples and 0 < depth < R".into()));
    }
    let sol = solve_exact(cfg, n, pol)?;
    let ie = 1 - pol.h_index();
    let depths: Vec<f64> = (0..samples).map(|i| depth_max * i as f64 / (samples - 1) as f64).collect();
    let log_amplitude = depths
        .iter()
        .map(|&d| Ok(sol.interior_field(cfg.radius - d)?.e[ie].norm().ln()))
        .collect::<Result<Vec<f64>>>()?;
    let m = samples as f64;
    let (md, ml) = (depths.iter().sum::<f64>() / m, log_amplitude.iter().sum::<f64>() / m);
    let (num, den) = depths.iter().zip(&log_amplitude).fold((0.0, 0.0), |(a, b), (&d, &y)| (a + (d - md) * (y - ml), b + (d - md) * (d - md)));
    let measured_rate = -num / den;
    let expected_rate = 1.0 / (std::f64::consts::SQRT_2 * cfg.delta);
    Ok(DecayFit {
        delta: cfg.delta,
        measured_rate,
        expected_rate,
        relative_error: (measured_rate - expected_rate).abs() / expected_rate,
        depths,
        log_amplitude,
    })
}
