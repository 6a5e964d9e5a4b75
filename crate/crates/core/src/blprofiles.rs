//! Boundary-layer recursion over a finite surface-symbol algebra.
//!
//! Fields are coefficient vectors in a three-dimensional space: two
//! tangential coordinates and one normal coordinate. For a sphere mode the
//! tangential ones are the gradient and curl vector spherical harmonics of a
//! single degree; for a general point they are the principal directions, and
//! the surface derivatives are user-supplied numbers.
//!
//! Unknowns per order `k` are the normalized electric field `Ê^k = E_i^(k+1)`
//! and the magnetic field `H_i^k`, both in `P_k · exp(-sqrt(i) eta)`.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::polyexp::{PolyExpProfile, ProfileVector};
use crate::specfun::SQRT_I;

pub type CMat3 = Matrix3<Complex64>;
pub type CVec3 = Vector3<Complex64>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Pointwise surface data. All derivative symbols act on the tangential
/// coordinates `(t1, t2)`:
/// `rot_Γ V = rot · V_T`, `Rot_Γ φ = rot_cap φ`, and their `M`-weighted twins.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolAlgebra {
    pub omega: f64,
    pub eps_r: f64,
    pub c1: f64,
    pub c2: f64,
    pub rot: [Complex64; 2],
    pub rot_cap: [Complex64; 2],
    pub rot_m: [Complex64; 2],
    pub rot_cap_m: [Complex64; 2],
}

impl SymbolAlgebra {
    /// Degree-`n` vector spherical harmonics on a sphere of radius `r`, seen
    /// from inside (`C = -I_Γ/r`, `M = h I_Γ`). Coordinates are
    /// `(grad_S Y, grad_S Y × e_r, Y n)`.
    pub fn sphere(n: usize, r: f64, omega: f64, eps_r: f64) -> Result<Self> {
        if n == 0 || !(r > 0.0) {
            return Err(Error::Precondition(format!("sphere mode needs n >= 1 and R > 0 (got n={n}, R={r})")));
        }
        let lam = (n * (n + 1)) as f64 / (r * r);
        let h = -1.0 / r;
        let zero = c(0.0);
        Ok(Self {
            omega,
            eps_r,
            c1: h,
            c2: h,
            rot: [zero, c(-lam * r)],
            rot_cap: [zero, c(-1.0 / r)],
            rot_m: [zero, c(-lam * r * h)],
            rot_cap_m: [zero, c(-h / r)],
        })
    }

    /// A single surface point with principal curvatures `(c1, c2)` and
    /// arbitrary derivative symbols.
    #[allow(clippy::too_many_arguments)]
    pub fn general(
        c1: f64,
        c2: f64,
        rot: [Complex64; 2],
        rot_cap: [Complex64; 2],
        rot_m: [Complex64; 2],
        rot_cap_m: [Complex64; 2],
        omega: f64,
        eps_r: f64,
    ) -> Self {
        Self { omega, eps_r, c1, c2, rot, rot_cap, rot_m, rot_cap_m }
    }

    pub fn h(&self) -> f64 {
        0.5 * (self.c1 + self.c2)
    }

    pub fn g(&self) -> f64 {
        self.c1 * self.c2
    }

    pub fn projector(&self) -> CMat3 {
        CMat3::from_diagonal(&CVec3::new(c(1.0), c(1.0), c(0.0)))
    }

    /// `v -> v × n`
    pub fn cross_n(&self) -> CMat3 {
        let mut m = CMat3::zeros();
        m[(0, 1)] = c(1.0);
        m[(1, 0)] = c(-1.0);
        m
    }

    /// `v -> n × v`
    pub fn n_cross(&self) -> CMat3 {
        -self.cross_n()
    }

    pub fn curvature(&self) -> CMat3 {
        CMat3::from_diagonal(&CVec3::new(c(self.c1), c(self.c2), c(0.0)))
    }

    pub fn mean(&self) -> CMat3 {
        self.projector() * c(self.h())
    }

    pub fn gauss(&self) -> CMat3 {
        self.projector() * c(self.g())
    }

    fn row(v: [Complex64; 2]) -> CMat3 {
        let mut m = CMat3::zeros();
        m[(2, 0)] = v[0];
        m[(2, 1)] = v[1];
        m
    }

    fn col(v: [Complex64; 2]) -> CMat3 {
        let mut m = CMat3::zeros();
        m[(0, 2)] = v[0];
        m[(1, 2)] = v[1];
        m
    }

    /// `C_Γ V = (rot_Γ V) n + Rot_Γ(V·n) - (C V) × n`
    pub fn c_gamma(&self) -> CMat3 {
        Self::row(self.rot) + Self::col(self.rot_cap) - self.cross_n() * self.curvature()
    }

    /// `C_Γ^M V = (rot_Γ^M V) n + Rot_Γ^M(V·n) - (G V) × n`
    pub fn c_gamma_m(&self) -> CMat3 {
        Self::row(self.rot_m) + Self::col(self.rot_cap_m) - self.cross_n() * self.gauss()
    }

    /// `Rot_Γ rot_Γ`
    pub fn rotrot(&self) -> CMat3 {
        Self::col(self.rot_cap) * Self::row(self.rot)
    }

    /// `grad_Γ div_Γ`, through `n × Rot_Γ(rot_Γ(V × n)) = -grad_Γ div_Γ V`.
    pub fn graddiv(&self) -> CMat3 {
        -(self.n_cross() * self.rotrot() * self.cross_n())
    }

    /// Vector Laplace–Beltrami `grad_Γ div_Γ - Rot_Γ rot_Γ`.
    pub fn laplacian(&self) -> CMat3 {
        self.graddiv() - self.rotrot()
    }
}

/// `m · p`, component-wise on profiles.
pub fn apply_matrix(m: &CMat3, p: &ProfileVector) -> ProfileVector {
    let row = |i: usize| {
        (0..3).fold(PolyExpProfile::zero(), |acc, j| {
            if m[(i, j)] == c(0.0) { acc } else { &acc + &p.0[j].scale(m[(i, j)]) }
        })
    };
    ProfileVector([row(0), row(1), row(2)])
}

fn d_eta(p: &ProfileVector) -> ProfileVector {
    p.map(PolyExpProfile::differentiate)
}

fn eta_times(p: &ProfileVector, power: usize) -> ProfileVector {
    p.map(|q| (0..power).fold(q.clone(), |acc, _| acc.mul_by_eta()))
}

fn scaled(p: &ProfileVector, s: Complex64) -> ProfileVector {
    p.map(|q| q.scale(s))
}

/// Right-hand side operators of the magnetic equation, `l = 1..=4`.
pub fn apply_ah(l: usize, u: &ProfileVector, v: &ProfileVector, alg: &SymbolAlgebra) -> Result<ProfileVector> {
    let w = alg.omega;
    let iew = Complex64::new(0.0, alg.eps_r * w);
    // d_eta v × n + u / omega
    let bracket = || &apply_matrix(&alg.cross_n(), &d_eta(v)) + &scaled(u, c(1.0 / w));
    Ok(match l {
        1 => &apply_matrix(&alg.c_gamma(), v) - &scaled(&eta_times(&bracket(), 1), c(2.0 * alg.h())),
        2 => {
            let a = scaled(u, -iew);
            let b = eta_times(&apply_matrix(&alg.c_gamma_m(), v), 1);
            let cc = scaled(&eta_times(&bracket(), 2), c(alg.g()));
            &(&a + &b) - &cc
        }
        3 => scaled(&eta_times(u, 1), -iew * 2.0 * alg.h()),
        4 => scaled(&eta_times(u, 2), -iew * alg.g()),
        _ => return Err(Error::Order { requested: l, available: 4 }),
    })
}

/// Right-hand side operators of the electric equation, `l = 1..=2`.
pub fn apply_ae(l: usize, u: &ProfileVector, v: &ProfileVector, alg: &SymbolAlgebra) -> Result<ProfileVector> {
    let iw = Complex64::new(0.0, alg.omega);
    // d_eta u × n - i omega v
    let bracket = || &apply_matrix(&alg.cross_n(), &d_eta(u)) - &scaled(v, iw);
    Ok(match l {
        1 => &scaled(&apply_matrix(&alg.c_gamma(), u), c(-1.0)) + &scaled(&eta_times(&bracket(), 1), c(2.0 * alg.h())),
        2 => {
            &scaled(&eta_times(&apply_matrix(&alg.c_gamma_m(), u), 1), c(-1.0))
                + &scaled(&eta_times(&bracket(), 2), c(alg.g()))
        }
        _ => return Err(Error::Order { requested: l, available: 2 }),
    })
}

/// Tangential exterior traces `H_{e,T}^l` in algebra coordinates, `l = 0, 1, ...`.
pub type Traces = Vec<[Complex64; 2]>;

/// Solved layer profiles for orders `0..=k`.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerState {
    /// `Ê^l = E_i^(l+1)`
    pub e_hat: Vec<ProfileVector>,
    /// `H_i^l`
    pub h: Vec<ProfileVector>,
}

impl LayerState {
    /// Highest computed order.
    pub fn order(&self) -> usize {
        self.h.len() - 1
    }

    /// The unnormalized electric terms `E_i^l`, with `E_i^0 = 0`.
    pub fn electric_terms(&self) -> Vec<ProfileVector> {
        std::iter::once(ProfileVector::zero()).chain(self.e_hat.iter().cloned()).collect()
    }
}

fn sources(alg: &SymbolAlgebra, e: &[ProfileVector], h: &[ProfileVector]) -> Result<(ProfileVector, ProfileVector)> {
    let k = h.len();
    let mut f = ProfileVector::zero();
    let mut g = ProfileVector::zero();
    for l in 1..=4.min(k) {
        f = &f + &apply_ah(l, &e[k - l], &h[k - l], alg)?;
        if l <= 2 {
            g = &g + &apply_ae(l, &e[k - l], &h[k - l], alg)?;
        }
    }
    Ok((f, g))
}

/// Solve the layer systems order by order up to `k`.
///
/// With `F`, `G` the right-hand sides of the magnetic and electric equations:
/// `Ê·n = omega F·n`, `H·n = -(i/omega) G·n`,
/// `(d² - i) H_T = n × dF - G_T/omega` with `H_T(0) = H_{e,T}^k`, and
/// `Ê_T = omega (F_T - dH × n)`.
pub fn run_recursion(alg: &SymbolAlgebra, traces: &[[Complex64; 2]], k: usize) -> Result<LayerState> {
    if traces.len() <= k {
        return Err(Error::Dimension { expected: k + 1, got: traces.len() });
    }
    let w = alg.omega;
    let mut e: Vec<ProfileVector> = Vec::with_capacity(k + 1);
    let mut h: Vec<ProfileVector> = Vec::with_capacity(k + 1);
    for order in 0..=k {
        let (f, g) = sources(alg, &e, &h)?;
        let src = &apply_matrix(&alg.n_cross(), &d_eta(&f)) - &scaled(&g, c(1.0 / w));
        let v = ProfileVector([
            PolyExpProfile::solve_layer_ode(&src.0[0], traces[order][0])?,
            PolyExpProfile::solve_layer_ode(&src.0[1], traces[order][1])?,
            g.0[2].scale(Complex64::new(0.0, -1.0 / w)),
        ]);
        let mut u = scaled(&(&f - &apply_matrix(&alg.cross_n(), &d_eta(&v))), c(w));
        u.0[2] = f.0[2].scale(c(w));
        e.push(u);
        h.push(v);
    }
    Ok(LayerState { e_hat: e, h })
}

/// Largest coefficient of the residuals of both layer equations at every order.
pub fn equation_residual(alg: &SymbolAlgebra, state: &LayerState) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let iw = Complex64::new(0.0, alg.omega);
    for k in 0..=state.order() {
        let (f, g) = sources(alg, &state.e_hat[..k], &state.h[..k])?;
        let (u, v) = (&state.e_hat[k], &state.h[k]);
        let lhs1 = &apply_matrix(&alg.cross_n(), &d_eta(v)) + &scaled(u, c(1.0 / alg.omega));
        let lhs2 = &scaled(&apply_matrix(&alg.cross_n(), &d_eta(u)), c(-1.0)) + &scaled(v, iw);
        worst = worst.max(lhs1.max_coeff_diff(&f)).max(lhs2.max_coeff_diff(&g));
    }
    Ok(worst)
}

/// `E_i^l × n` at `eta = 0`, in algebra coordinates. `E_i^0 = 0`.
pub fn trace_ek_cross_n(state: &LayerState, l: usize) -> Result<CVec3> {
    if l == 0 {
        return Ok(CVec3::zeros());
    }
    let e = state.e_hat.get(l - 1).ok_or(Error::Order { requested: l, available: state.order() + 1 })?;
    let at0 = e.evaluate(0.0);
    // (v1, v2, v3) × n = (v2, -v1, 0)
    Ok(CVec3::new(at0[1], -at0[0], c(0.0)))
}

pub fn trace_vec(t: [Complex64; 2]) -> CVec3 {
    CVec3::new(t[0], t[1], c(0.0))
}

/// `Q = C² - H² + eps_r omega² + grad_Γ div_Γ + Rot_Γ rot_Γ`
pub fn q_operator(alg: &SymbolAlgebra) -> CMat3 {
    let (cm, hm) = (alg.curvature(), alg.mean());
    cm * cm - hm * hm + alg.projector() * c(alg.eps_r * alg.omega * alg.omega) + alg.graddiv() + alg.rotrot()
}

/// Right-hand side `phi_k` of `E_{e,k} × n + omega D^k[H_{e,k}] = delta^(k+1) phi_k`.
///
/// `phi_3 = phi_{3,0} + delta omega R[H_{e,3}]` with the remainder `R` of the
/// regularized third-order operator.
pub fn phi_k(alg: &SymbolAlgebra, traces: &[[Complex64; 2]], delta: f64, k: usize) -> Result<CVec3> {
    if k > 3 {
        return Err(Error::Order { requested: k, available: 3 });
    }
    if traces.len() <= k {
        return Err(Error::Dimension { expected: k + 1, got: traces.len() });
    }
    let w = c(alg.omega);
    let t = |l: usize| trace_vec(traces[l]);
    let hc = alg.mean() - alg.curvature();
    Ok(match k {
        0 => CVec3::zeros(),
        1 => t(1) * SQRT_I * w,
        2 => (t(2) * SQRT_I + hc * (t(1) + t(2) * c(delta))) * w,
        _ => {
            let q = q_operator(alg);
            let phi30 = (t(3) * SQRT_I
                + hc * (t(2) + t(3) * c(delta))
                + q * (t(1) + t(2) * c(delta) + t(3) * c(delta * delta)) / (SQRT_I * 2.0))
                * w;
            let htilde = (0..=3).fold(CVec3::zeros(), |acc, l| acc + t(l) * c(delta.powi(l as i32)));
            let r = crate::gibc_symbols::remainder_matrix(alg, delta)?;
            phi30 + r * htilde * (w * delta)
        }
    })
}

/// Closed forms of the explicit profiles and traces, written out
/// independently of [`run_recursion`].
pub mod displays {
    use super::*;

    fn profile_vec(terms: &[CVec3]) -> ProfileVector {
        let comp = |i: usize| PolyExpProfile::new(terms.iter().map(|t| t[i]).collect());
        ProfileVector([comp(0), comp(1), comp(2)])
    }

    /// `(Ê^0, H_i^0) = (sqrt(i) omega H^0 × n, H^0) e`
    pub fn order0(alg: &SymbolAlgebra, h0: [Complex64; 2]) -> (ProfileVector, ProfileVector) {
        let h = trace_vec(h0);
        (profile_vec(&[alg.cross_n() * h * (SQRT_I * alg.omega)]), profile_vec(&[h]))
    }

    /// `Ê^1·n = omega rot_Γ H^0 e` and `H_i^1·n = -(1/sqrt(i)) rot_Γ(H^0 × n) e`
    pub fn order1_normal(alg: &SymbolAlgebra, h0: [Complex64; 2]) -> (Complex64, Complex64) {
        let h = trace_vec(h0);
        let rot = |v: CVec3| alg.rot[0] * v[0] + alg.rot[1] * v[1];
        (rot(h) * alg.omega, -rot(alg.cross_n() * h) / SQRT_I)
    }

    /// `H_{i,T}^1 = (H^1 - eta H H^0) e`
    pub fn h1_tangential(alg: &SymbolAlgebra, t: &[[Complex64; 2]]) -> ProfileVector {
        profile_vec(&[trace_vec(t[1]), -(alg.mean() * trace_vec(t[0]))])
    }

    /// `Ê^1 × n = omega(-sqrt(i) H^1 + (C - H) H^0 + eta sqrt(i) H H^0) e`
    pub fn e1_cross_n(alg: &SymbolAlgebra, t: &[[Complex64; 2]]) -> ProfileVector {
        let w = alg.omega;
        let (h0, h1) = (trace_vec(t[0]), trace_vec(t[1]));
        let cmh = alg.curvature() - alg.mean();
        profile_vec(&[(h1 * -SQRT_I + cmh * h0) * c(w), alg.mean() * h0 * (SQRT_I * w)])
    }

    /// `H_{i,T}^2 = (H^2 - eta H H^1 + eta/(2 sqrt(i)) (H² - C² + Δ + eps omega²) H^0
    ///  + eta²/2 (3H² - G) H^0) e`
    pub fn h2_tangential(alg: &SymbolAlgebra, t: &[[Complex64; 2]]) -> ProfileVector {
        let (h0, h1, h2) = (trace_vec(t[0]), trace_vec(t[1]), trace_vec(t[2]));
        let (cm, hm, gm, p) = (alg.curvature(), alg.mean(), alg.gauss(), alg.projector());
        let eo2 = c(alg.eps_r * alg.omega * alg.omega);
        let lin = -(hm * h1) + (hm * hm - cm * cm + alg.laplacian() + p * eo2) * h0 / (SQRT_I * 2.0);
        let quad = (hm * hm * c(3.0) - gm) * h0 * c(0.5);
        profile_vec(&[h2, lin, quad])
    }

    /// Full `Ê^2 × n` display.
    pub fn e2_cross_n(alg: &SymbolAlgebra, t: &[[Complex64; 2]]) -> ProfileVector {
        let w = alg.omega;
        let (h0, h1, h2) = (trace_vec(t[0]), trace_vec(t[1]), trace_vec(t[2]));
        let (cm, hm, gm, p) = (alg.curvature(), alg.mean(), alg.gauss(), alg.projector());
        let eo2 = c(alg.eps_r * w * w);
        let c0 = h2 * -SQRT_I + (cm - hm) * h1 - q_operator(alg) * h0 / (SQRT_I * 2.0);
        let c1 = hm * h1 * SQRT_I
            + (hm * hm * c(5.0) - hm * cm * c(6.0) + cm * cm - alg.laplacian() - p * eo2) * h0 * c(0.5);
        let c2 = (hm * hm * c(3.0) - gm) * h0 * (-SQRT_I * 0.5);
        profile_vec(&[c0 * c(w), c1 * c(w), c2 * c(w)])
    }

    /// `E_i^l × n` at `eta = 0` for `l = 1, 2, 3`.
    pub fn trace(alg: &SymbolAlgebra, t: &[[Complex64; 2]], l: usize) -> CVec3 {
        let w = alg.omega;
        let h = |j: usize| trace_vec(t[j]);
        let cmh = alg.curvature() - alg.mean();
        match l {
            1 => h(0) * -SQRT_I * c(w),
            2 => (h(1) * -SQRT_I + cmh * h(0)) * c(w),
            3 => (h(2) * -SQRT_I + cmh * h(1) - q_operator(alg) * h(0) / (SQRT_I * 2.0)) * c(w),
            _ => CVec3::zeros(),
        }
    }
}
