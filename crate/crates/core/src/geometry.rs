//! Differential geometry of a surface seen from its inner side.
//!
//! The normal `n` points into the obstacle and the curvature tensor is
//! `C = grad_Γ n`. For a sphere of radius `R` this gives `C = -I_Γ / R`.

use nalgebra::{Matrix2, Matrix3, SymmetricEigen, Vector3};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Principal curvatures and the orthonormal frame `(tau1, tau2, n)` at a point.
/// The frame is right-handed: `tau1 × tau2 = n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvatureData {
    pub c1: f64,
    pub c2: f64,
    pub tau1: Vec3,
    pub tau2: Vec3,
    pub n: Vec3,
}

impl CurvatureData {
    /// Curvatures in the canonical frame `(e_x, e_y, e_z)`.
    pub fn canonical(c1: f64, c2: f64) -> Self {
        Self { c1, c2, tau1: Vec3::x(), tau2: Vec3::y(), n: Vec3::z() }
    }

    /// Mean curvature.
    pub fn h(&self) -> f64 {
        0.5 * (self.c1 + self.c2)
    }

    /// Gaussian curvature.
    pub fn g(&self) -> f64 {
        self.c1 * self.c2
    }

    pub fn projector(&self) -> Mat3 {
        self.tau1 * self.tau1.transpose() + self.tau2 * self.tau2.transpose()
    }

    /// `C`
    pub fn curvature_tensor(&self) -> Mat3 {
        self.tau1 * self.tau1.transpose() * self.c1 + self.tau2 * self.tau2.transpose() * self.c2
    }

    /// `H = h I_Γ`
    pub fn mean_tensor(&self) -> Mat3 {
        self.projector() * self.h()
    }

    /// `G = g I_Γ`
    pub fn gauss_tensor(&self) -> Mat3 {
        self.projector() * self.g()
    }

    /// `M = 2H - C`
    pub fn m_tensor(&self) -> Mat3 {
        self.mean_tensor() * 2.0 - self.curvature_tensor()
    }

    /// Tangential inverse of `I + nu C`: `(I + nu C) R_nu = I_Γ`.
    pub fn r_nu(&self, nu: f64) -> Mat3 {
        self.tau1 * self.tau1.transpose() / (1.0 + nu * self.c1)
            + self.tau2 * self.tau2.transpose() / (1.0 + nu * self.c2)
    }

    /// Largest thickness the defaults allow: `0.5 / max |c_i|`.
    pub fn default_thickness(&self) -> f64 {
        let m = self.c1.abs().max(self.c2.abs());
        if m == 0.0 { f64::INFINITY } else { 0.5 / m }
    }
}

/// `J(nu) = det(I + nu C) = 1 + 2 nu h + nu^2 g`
pub fn jacobian(nu: f64, cd: &CurvatureData) -> f64 {
    1.0 + 2.0 * nu * cd.h() + nu * nu * cd.g()
}

/// `J(nu)`, or a domain error if the layer folds over at this depth.
pub fn condnubar_check(nu: f64, cd: &CurvatureData) -> Result<f64> {
    let j = jacobian(nu, cd);
    if j > 0.0 {
        Ok(j)
    } else {
        Err(Error::Domain(format!("J({nu}) = {j} <= 0: layer thickness too large for curvatures ({}, {})", cd.c1, cd.c2)))
    }
}

pub fn is_tangential(m: &Mat3, n: &Vec3, tol: f64) -> bool {
    (m * n).norm() <= tol
}

#[derive(Clone, Copy, Debug, Default)]
pub struct TensorReport {
    /// `|M - (2H - C)|`
    pub m_definition: f64,
    /// `|MC - G|`
    pub mc_equals_g: f64,
    /// `|(I + nu C) R_nu - I_Γ|`
    pub r_nu_inverse: f64,
    /// `|J R_nu - (I_Γ + nu M)|`
    pub jr_expansion: f64,
    /// Largest `|T n|` over the tangential tensors.
    pub tangentiality: f64,
}

impl TensorReport {
    pub fn max_residual(&self) -> f64 {
        [self.m_definition, self.mc_equals_g, self.r_nu_inverse, self.jr_expansion, self.tangentiality]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Residuals of the pointwise tensor identities, with `M` built from the
/// eigenbasis independently of `2H - C`.
pub fn tensor_identities(cd: &CurvatureData, nu: f64) -> TensorReport {
    let c = cd.curvature_tensor();
    let p = cd.projector();
    let m_eig = cd.tau1 * cd.tau1.transpose() * cd.c2 + cd.tau2 * cd.tau2.transpose() * cd.c1;
    let m = cd.m_tensor();
    let r = cd.r_nu(nu);
    let tangentiality = [c, p, cd.mean_tensor(), cd.gauss_tensor(), m, r]
        .iter()
        .map(|t| (t * cd.n).norm())
        .fold(0.0, f64::max);
    TensorReport {
        m_definition: (m_eig - m).norm(),
        mc_equals_g: (m * c - cd.gauss_tensor()).norm(),
        r_nu_inverse: ((Mat3::identity() + c * nu) * r - p).norm(),
        jr_expansion: (r * jacobian(nu, cd) - (p + m * nu)).norm(),
        tangentiality,
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct VectorReport {
    /// `(C(V×n))×n - CV + 2HV`
    pub mean_identity: f64,
    /// `{C((H-C)(V×n))}×n - (C² + 2H² - 3HC)V`
    pub hc_identity: f64,
    /// `(C(V×n))×n - (C - 2H)V`
    pub c_identity: f64,
    /// `{(3HC - G)(V×n)}×n - (3HC + G - 6H²)V`
    pub g_identity: f64,
}

impl VectorReport {
    pub fn max_residual(&self) -> f64 {
        [self.mean_identity, self.hc_identity, self.c_identity, self.g_identity].into_iter().fold(0.0, f64::max)
    }
}

/// Residuals of the algebraic identities used to simplify the layer traces.
///
/// The `(H-C)` identity is checked with right side `(C² + 2H² - 3HC)V`;
/// the eigenbasis computation fixes the sign.
pub fn vector_identities(cd: &CurvatureData, v: &Vec3) -> Result<VectorReport> {
    let n = cd.n;
    if v.dot(&n).abs() > 1e-12 * v.norm().max(1.0) {
        return Err(Error::Precondition(format!("vector is not tangential: V·n = {:e}", v.dot(&n))));
    }
    let c = cd.curvature_tensor();
    let h = cd.mean_tensor();
    let g = cd.gauss_tensor();
    let vxn = v.cross(&n);
    let mean_identity = ((c * vxn).cross(&n) - c * v + h * v * 2.0).norm();
    let hc_identity = ((c * ((h - c) * vxn)).cross(&n) - (c * c + h * h * 2.0 - h * c * 3.0) * v).norm();
    let c_identity = ((c * vxn).cross(&n) - (c - h * 2.0) * v).norm();
    let g_identity = (((h * c * 3.0 - g) * vxn).cross(&n) - (h * c * 3.0 + g - h * h * 6.0) * v).norm();
    Ok(VectorReport { mean_identity, hc_identity, c_identity, g_identity })
}

/// A chart `(u, v) -> X(u, v)` with analytic derivatives up to order two.
/// The inner normal is `-(X_u × X_v)/|X_u × X_v|` for every built-in.
pub trait ParametricSurface: Send + Sync {
    fn name(&self) -> &str;
    /// `[u_min, u_max] × [v_min, v_max]` on which the chart is an immersion.
    fn parameter_box(&self) -> ([f64; 2], [f64; 2]);
    fn point(&self, u: f64, v: f64) -> Vec3;
    /// `(X_u, X_v)`
    fn first_derivatives(&self, u: f64, v: f64) -> (Vec3, Vec3);
    /// `(X_uu, X_uv, X_vv)`
    fn second_derivatives(&self, u: f64, v: f64) -> (Vec3, Vec3, Vec3);

    fn normal(&self, u: f64, v: f64) -> Vec3 {
        let (xu, xv) = self.first_derivatives(u, v);
        -xu.cross(&xv).normalize()
    }

    fn first_fundamental_form(&self, u: f64, v: f64) -> Matrix2<f64> {
        let (xu, xv) = self.first_derivatives(u, v);
        Matrix2::new(xu.dot(&xu), xu.dot(&xv), xu.dot(&xv), xv.dot(&xv))
    }

    /// `L_ij = X_ij · n`
    fn second_fundamental_form(&self, u: f64, v: f64) -> Matrix2<f64> {
        let n = self.normal(u, v);
        let (a, b, c) = self.second_derivatives(u, v);
        Matrix2::new(a.dot(&n), b.dot(&n), b.dot(&n), c.dot(&n))
    }

    /// `C = sum_ij g^ij X_i ⊗ d_j n` with Weingarten `d_j n = -sum L_jk g^kl X_l`.
    fn curvature_tensor(&self, u: f64, v: f64) -> Mat3 {
        let (xu, xv) = self.first_derivatives(u, v);
        let ginv = self.first_fundamental_form(u, v).try_inverse().expect("chart is an immersion");
        let l = self.second_fundamental_form(u, v);
        let x = [xu, xv];
        let s = -(l * ginv);
        let dn: Vec<Vec3> = (0..2).map(|j| x[0] * s[(j, 0)] + x[1] * s[(j, 1)]).collect();
        let mut c = Mat3::zeros();
        for i in 0..2 {
            for j in 0..2 {
                c += x[i] * dn[j].transpose() * ginv[(i, j)];
            }
        }
        // symmetric up to rounding; remove the rounding
        (c + c.transpose()) * 0.5
    }

    fn curvature_data(&self, u: f64, v: f64) -> CurvatureData {
        let n = self.normal(u, v);
        let c = self.curvature_tensor(u, v);
        let (xu, _) = self.first_derivatives(u, v);
        let e1 = xu.normalize();
        let e2 = n.cross(&e1);
        let m = Matrix2::new(e1.dot(&(c * e1)), e1.dot(&(c * e2)), e2.dot(&(c * e1)), e2.dot(&(c * e2)));
        let eig = SymmetricEigen::new(m);
        let (i1, i2) = if eig.eigenvalues[0] >= eig.eigenvalues[1] { (0, 1) } else { (1, 0) };
        let col = |i: usize| (e1 * eig.eigenvectors[(0, i)] + e2 * eig.eigenvectors[(1, i)]).normalize();
        let tau1 = col(i1);
        CurvatureData { c1: eig.eigenvalues[i1], c2: eig.eigenvalues[i2], tau1, tau2: n.cross(&tau1), n }
    }
}

#[derive(Clone, Debug)]
pub struct Sphere {
    pub radius: f64,
}

/// Polar angle is kept away from the poles, where the chart degenerates.
const POLE_MARGIN: f64 = 0.05;

impl ParametricSurface for Sphere {
    fn name(&self) -> &str {
        "sphere"
    }
    fn parameter_box(&self) -> ([f64; 2], [f64; 2]) {
        ([POLE_MARGIN, std::f64::consts::PI - POLE_MARGIN], [0.0, 2.0 * std::f64::consts::PI])
    }
    fn point(&self, u: f64, v: f64) -> Vec3 {
        Ellipsoid::new(self.radius, self.radius, self.radius).point(u, v)
    }
    fn first_derivatives(&self, u: f64, v: f64) -> (Vec3, Vec3) {
        Ellipsoid::new(self.radius, self.radius, self.radius).first_derivatives(u, v)
    }
    fn second_derivatives(&self, u: f64, v: f64) -> (Vec3, Vec3, Vec3) {
        Ellipsoid::new(self.radius, self.radius, self.radius).second_derivatives(u, v)
    }
}

/// `(a sin u cos v, b sin u sin v, c cos u)`
#[derive(Clone, Debug)]
pub struct Ellipsoid {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Ellipsoid {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }
}

impl ParametricSurface for Ellipsoid {
    fn name(&self) -> &str {
        "ellipsoid"
    }
    fn parameter_box(&self) -> ([f64; 2], [f64; 2]) {
        ([POLE_MARGIN, std::f64::consts::PI - POLE_MARGIN], [0.0, 2.0 * std::f64::consts::PI])
    }
    fn point(&self, u: f64, v: f64) -> Vec3 {
        let (su, cu) = u.sin_cos();
        let (sv, cv) = v.sin_cos();
        Vec3::new(self.a * su * cv, self.b * su * sv, self.c * cu)
    }
    fn first_derivatives(&self, u: f64, v: f64) -> (Vec3, Vec3) {
        let (su, cu) = u.sin_cos();
        let (sv, cv) = v.sin_cos();
        (
            Vec3::new(self.a * cu * cv, self.b * cu * sv, -self.c * su),
            Vec3::new(-self.a * su * sv, self.b * su * cv, 0.0),
        )
    }
    fn second_derivatives(&self, u: f64, v: f64) -> (Vec3, Vec3, Vec3) {
        let (su, cu) = u.sin_cos();
        let (sv, cv) = v.sin_cos();
        (
            Vec3::new(-self.a * su * cv, -self.b * su * sv, -self.c * cu),
            Vec3::new(-self.a * cu * sv, self.b * cu * cv, 0.0),
            Vec3::new(-self.a * su * cv, -self.b * su * sv, 0.0),
        )
    }
}

/// `((R0 + r0 cos v) cos u, (R0 + r0 cos v) sin u, r0 sin v)`
#[derive(Clone, Debug)]
pub struct Torus {
    pub major: f64,
    pub minor: f64,
}

impl ParametricSurface for Torus {
    fn name(&self) -> &str {
        "torus"
    }
    fn parameter_box(&self) -> ([f64; 2], [f64; 2]) {
        ([0.0, 2.0 * std::f64::consts::PI], [0.0, 2.0 * std::f64::consts::PI])
    }
    fn point(&self, u: f64, v: f64) -> Vec3 {
        let (su, cu) = u.sin_cos();
        let (sv, cv) = v.sin_cos();
        let w = self.major + self.minor * cv;
        Vec3::new(w * cu, w * su, self.minor * sv)
    }
    fn first_derivatives(&self, u: f64, v: f64) -> (Vec3, Vec3) {
        let (su, cu) = u.sin_cos();
        let (sv, cv) = v.sin_cos();
        let w = self.major + self.minor * cv;
        let r = self.minor;
        (Vec3::new(-w * su, w * cu, 0.0), Vec3::new(-r * sv * cu, -r * sv * su, r * cv))
    }
    fn second_derivatives(&self, u: f64, v: f64) -> (Vec3, Vec3, Vec3) {
        let (su, cu) = u.sin_cos();
        let (sv, cv) = v.sin_cos();
        let w = self.major + self.minor * cv;
        let r = self.minor;
        (
            Vec3::new(-w * cu, -w * su, 0.0),
            Vec3::new(r * sv * su, -r * sv * cu, 0.0),
            Vec3::new(-r * cv * cu, -r * cv * su, -r * sv),
        )
    }
}

/// A Cartesian vector field restricted to a layer `Γ × (0, thickness)`.
pub struct LocalField<'a> {
    pub surface: &'a dyn ParametricSurface,
    pub field: &'a (dyn Fn(&Vec3) -> Vec3 + Sync),
    pub thickness: f64,
}

impl LocalField<'_> {
    /// `V̂(u, v, nu) = V(X(u, v) + nu n(u, v))`
    pub fn hat(&self, u: f64, v: f64, nu: f64) -> Vec3 {
        (self.field)(&(self.surface.point(u, v) + self.surface.normal(u, v) * nu))
    }
}

/// Finite-difference settings for the chart derivatives in [`curl_local`].
#[derive(Clone, Copy, Debug)]
pub struct CurlOptions {
    pub step: f64,
    /// Combine steps `h` and `h/2` to cancel the `h^2` error term.
    pub richardson: bool,
}

impl Default for CurlOptions {
    fn default() -> Self {
        Self { step: 1e-3, richardson: true }
    }
}

fn central<T>(f: impl Fn(f64) -> T, h: f64, richardson: bool) -> T
where
    T: std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
{
    let d = |s: f64| (f(s) - f(-s)) * (0.5 / s);
    if richardson {
        d(h / 2.0) * (4.0 / 3.0) + d(h) * (-1.0 / 3.0)
    } else {
        d(h)
    }
}

/// Curl of `field` at `X(u, v) + nu n(u, v)` from the local-coordinate form
/// `J curl V = (C_Γ + nu C_Γ^M) V̂ - J d_nu(V̂ × n)`.
///
/// Tangential derivatives of `V̂` and of `n` come from the chart by central
/// differences; `grad_Γ f = sum g^ij d_i f X_j`.
pub fn curl_local(lf: &LocalField<'_>, u: f64, v: f64, nu: f64, opts: CurlOptions) -> Result<Vec3> {
    let s = lf.surface;
    let cd = s.curvature_data(u, v);
    if nu < 0.0 || nu >= lf.thickness {
        return Err(Error::Domain(format!("depth {nu} outside the layer (0, {})", lf.thickness)));
    }
    let j = condnubar_check(nu, &cd)?;
    let n = cd.n;
    let (xu, xv) = s.first_derivatives(u, v);
    let ginv = s.first_fundamental_form(u, v).try_inverse().expect("chart is an immersion");
    let basis = [xu, xv];

    let w = |a: f64, b: f64| lf.hat(a, b, nu).cross(&s.normal(a, b));
    let q = |a: f64, b: f64| lf.hat(a, b, nu).dot(&s.normal(a, b));
    let h = opts.step;
    let r = opts.richardson;
    let dw = [central(|t| w(u + t, v), h, r), central(|t| w(u, v + t), h, r)];
    let dq = [central(|t| q(u + t, v), h, r), central(|t| q(u, v + t), h, r)];

    // grad_Γ of each Cartesian component of W, as columns
    let mut grad_w = Mat3::zeros();
    let mut grad_q = Vec3::zeros();
    for a in 0..2 {
        for b in 0..2 {
            grad_w += basis[b] * dw[a].transpose() * ginv[(a, b)];
            grad_q += basis[b] * dq[a] * ginv[(a, b)];
        }
    }
    let p = cd.projector();
    let m = cd.m_tensor();
    let weight = p + m * nu;
    // ((I + nu M) grad_Γ)·W = sum_i ((I + nu M) grad_Γ W_i)_i
    let div = (weight * grad_w).trace();
    let hat = lf.hat(u, v, nu);
    let c_term = (cd.curvature_tensor() + cd.gauss_tensor() * nu) * hat;
    let dnu = central(|t| lf.hat(u, v, nu + t).cross(&n), h, r);

    let jcurl = n * div + (weight * grad_q).cross(&n) - c_term.cross(&n) - dnu * j;
    Ok(jcurl / j)
}

/// Curl by central differences in Cartesian coordinates, the oracle for [`curl_local`].
pub fn cartesian_fd_curl(field: &dyn Fn(&Vec3) -> Vec3, x: &Vec3, h: f64, richardson: bool) -> Vec3 {
    let d = |k: usize| central(|t| field(&(x + Vec3::ith(k, 1.0) * t)), h, richardson);
    let (dx, dy, dz) = (d(0), d(1), d(2));
    Vec3::new(dy.z - dz.y, dz.x - dx.z, dx.y - dy.x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn jacobian_examples() {
        assert_relative_eq!(jacobian(0.1, &CurvatureData::canonical(1.0, 1.0)), 1.21, epsilon = 1e-15);
        assert_eq!(jacobian(0.0, &CurvatureData::canonical(3.0, -7.0)), 1.0);
        let cd = CurvatureData::canonical(0.5, -1.0 / 3.0);
        let det = (Mat3::identity() + cd.curvature_tensor() * 0.05).determinant();
        assert_relative_eq!(jacobian(0.05, &cd), det, epsilon = 1e-15);
    }

    #[test]
    fn condnubar() {
        let cd = CurvatureData::canonical(-2.0, 1.0);
        assert!(condnubar_check(0.6, &cd).is_err());
        assert!(condnubar_check(cd.default_thickness(), &cd).is_ok());
    }

    #[test]
    fn tensor_examples() {
        let sphere = CurvatureData::canonical(1.0, 1.0);
        assert!((sphere.m_tensor() - sphere.projector()).norm() < 1e-15);

        let cd = CurvatureData::canonical(2.0, 0.0);
        let m = cd.m_tensor();
        assert_eq!((m[(0, 0)], m[(1, 1)]), (0.0, 2.0));
        assert!((m * cd.curvature_tensor()).norm() < 1e-15);

        let saddle = CurvatureData::canonical(1.0, -1.0);
        assert!((saddle.gauss_tensor() + saddle.projector()).norm() < 1e-15);
        for cd in [sphere, cd, saddle] {
            assert!(tensor_identities(&cd, 0.2).max_residual() < 1e-13);
        }
    }

    #[test]
    fn vector_identity_examples() {
        let cd = CurvatureData::canonical(3.0, 1.0);
        let r = vector_identities(&cd, &Vec3::x()).unwrap();
        assert!(r.max_residual() < 1e-13, "{r:?}");
        assert_eq!(vector_identities(&cd, &Vec3::zeros()).unwrap().max_residual(), 0.0);
        assert!(matches!(vector_identities(&cd, &Vec3::z()), Err(Error::Precondition(_))));

        // sphere-like: C = H, so the identity collapses to -2hV
        let cd = CurvatureData::canonical(0.5, 0.5);
        let v = Vec3::new(0.3, -1.2, 0.0);
        let c = cd.curvature_tensor();
        let lhs = (c * v.cross(&cd.n)).cross(&cd.n) - c * v;
        assert!((lhs + v * 2.0 * cd.h()).norm() < 1e-15);
    }

    #[test]
    fn literal_hc_identity_sign_fails_off_the_sphere() {
        // {C((H-C)(V×n))}×n equals -(3HC - C² - 2H²)V, not +.
        let cd = CurvatureData::canonical(1.0, 0.0);
        let (c, h) = (cd.curvature_tensor(), cd.mean_tensor());
        let v = Vec3::y();
        let lhs = (c * ((h - c) * v.cross(&cd.n))).cross(&cd.n);
        let literal = (h * c * 3.0 - c * c - h * h * 2.0) * v;
        assert_relative_eq!(lhs.y, 0.5, epsilon = 1e-15);
        assert_relative_eq!(literal.y, -0.5, epsilon = 1e-15);
    }

    fn surfaces() -> Vec<Box<dyn ParametricSurface>> {
        vec![
            Box::new(Sphere { radius: 1.7 }),
            Box::new(Ellipsoid::new(1.0, 1.3, 0.8)),
            Box::new(Torus { major: 2.0, minor: 0.6 }),
        ]
    }

    fn random_point(s: &dyn ParametricSurface, rng: &mut ChaCha8Rng) -> (f64, f64) {
        let (bu, bv) = s.parameter_box();
        (rng.gen_range(bu[0]..bu[1]), rng.gen_range(bv[0]..bv[1]))
    }

    #[test]
    fn analytic_chart_derivatives_match_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for s in surfaces() {
            for _ in 0..20 {
                let (u, v) = random_point(s.as_ref(), &mut rng);
                let (xu, xv) = s.first_derivatives(u, v);
                let (xuu, xuv, xvv) = s.second_derivatives(u, v);
                let fu = central(|t| s.point(u + t, v), 1e-3, true);
                let fv = central(|t| s.point(u, v + t), 1e-3, true);
                assert!((fu - xu).norm() < 1e-10 && (fv - xv).norm() < 1e-10, "{}", s.name());
                let fuu = central(|t| s.first_derivatives(u + t, v).0, 1e-3, true);
                let fuv = central(|t| s.first_derivatives(u, v + t).0, 1e-3, true);
                let fvv = central(|t| s.first_derivatives(u, v + t).1, 1e-3, true);
                assert!((fuu - xuu).norm() < 1e-10, "{}", s.name());
                assert!((fuv - xuv).norm() < 1e-10 && (fvv - xvv).norm() < 1e-10, "{}", s.name());
            }
        }
    }

    #[test]
    fn known_curvatures() {
        let s = Sphere { radius: 2.0 };
        let cd = s.curvature_data(0.7, 1.1);
        assert_relative_eq!(cd.c1, -0.5, epsilon = 1e-14);
        assert_relative_eq!(cd.c2, -0.5, epsilon = 1e-14);
        assert!((cd.n + s.point(0.7, 1.1) / 2.0).norm() < 1e-14);

        // torus: -1/r0 across the tube, -cos v/(R0 + r0 cos v) along it
        let t = Torus { major: 2.0, minor: 0.6 };
        for v in [0.0, 1.0, 2.5, 4.0] {
            let cd = t.curvature_data(0.3, v);
            let mut got = [cd.c1, cd.c2];
            let mut want = [-1.0 / 0.6, -v.cos() / (2.0 + 0.6 * v.cos())];
            got.sort_by(f64::total_cmp);
            want.sort_by(f64::total_cmp);
            assert_relative_eq!(got[0], want[0], epsilon = 1e-13);
            assert_relative_eq!(got[1], want[1], epsilon = 1e-13);
        }

        // ellipsoid Gaussian curvature 1 / (a b c (x²/a⁴ + y²/b⁴ + z²/c⁴))²
        let e = Ellipsoid::new(1.0, 1.3, 0.8);
        let x = e.point(1.2, 0.4);
        let q = x.x.powi(2) / 1.0 + x.y.powi(2) / 1.3f64.powi(4) + x.z.powi(2) / 0.8f64.powi(4);
        let k = 1.0 / (1.0 * 1.3 * 0.8 * q).powi(2);
        assert_relative_eq!(e.curvature_data(1.2, 0.4).g(), k, epsilon = 1e-13);
    }

    #[test]
    fn frames_and_identities_on_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for s in surfaces() {
            for _ in 0..100 {
                let (u, v) = random_point(s.as_ref(), &mut rng);
                let cd = s.curvature_data(u, v);
                for (a, b) in [(cd.tau1, cd.tau2), (cd.tau1, cd.n), (cd.tau2, cd.n)] {
                    assert!(a.dot(&b).abs() < 1e-14);
                }
                assert!((cd.tau1.cross(&cd.tau2) - cd.n).norm() < 1e-14);
                assert!((s.curvature_tensor(u, v) - cd.curvature_tensor()).norm() < 1e-13);
                let nubar = cd.default_thickness();
                for frac in [0.0, 0.3, 0.99] {
                    assert!(jacobian(frac * nubar, &cd) > 0.0);
                    assert!(tensor_identities(&cd, frac * nubar).max_residual() < 1e-13);
                }
                let t = cd.tau1 * rng.gen_range(-2.0..2.0) + cd.tau2 * rng.gen_range(-2.0..2.0);
                assert!(vector_identities(&cd, &t).unwrap().max_residual() < 1e-13);
            }
        }
    }

    fn test_field(x: &Vec3) -> Vec3 {
        Vec3::new(x.y.sin() + x.z * x.z, x.x * x.z, x.x.cos() * x.y)
    }

    fn test_field_curl(x: &Vec3) -> Vec3 {
        Vec3::new(x.x.cos() - x.x, 2.0 * x.z + x.y * x.x.sin(), x.z - x.y.cos())
    }

    #[test]
    fn curl_of_rotation_near_sphere() {
        let s = Sphere { radius: 1.0 };
        let f = |x: &Vec3| Vec3::new(-x.y, x.x, 0.0);
        let lf = LocalField { surface: &s, field: &f, thickness: 0.5 };
        let c = curl_local(&lf, 1.0, 0.4, 0.1, CurlOptions::default()).unwrap();
        assert!((c - Vec3::new(0.0, 0.0, 2.0)).norm() < 1e-9, "{c}");
    }

    #[test]
    fn curl_local_matches_oracles() {
        let e = Ellipsoid::new(1.0, 1.3, 0.8);
        let lf = LocalField { surface: &e, field: &test_field, thickness: 0.2 };
        for &(u, v, nu) in &[(0.8, 0.3, 0.05), (1.9, 2.2, 0.1), (1.3, 4.0, 0.0)] {
            let got = curl_local(&lf, u, v, nu, CurlOptions::default()).unwrap();
            let x = e.point(u, v) + e.normal(u, v) * nu;
            let fd = cartesian_fd_curl(&test_field, &x, 1e-3, true);
            let exact = test_field_curl(&x);
            assert!((got - fd).norm() <= 1e-6 * fd.norm(), "{got} vs {fd}");
            assert!((got - exact).norm() <= 1e-6 * exact.norm(), "{got} vs {exact}");
        }
    }

    #[test]
    fn curl_local_second_order_without_extrapolation() {
        let t = Torus { major: 2.0, minor: 0.6 };
        let lf = LocalField { surface: &t, field: &test_field, thickness: 0.25 };
        let (u, v, nu) = (0.7, 1.1, 0.08);
        let exact = test_field_curl(&(t.point(u, v) + t.normal(u, v) * nu));
        let err = |h: f64| {
            (curl_local(&lf, u, v, nu, CurlOptions { step: h, richardson: false }).unwrap() - exact).norm()
        };
        let order = (err(2e-2) / err(1e-2)).log2();
        assert!((order - 2.0).abs() < 0.1, "observed order {order}");
    }

    #[test]
    fn curl_local_rejects_folded_layer() {
        let s = Sphere { radius: 1.0 };
        let f = |x: &Vec3| *x;
        let lf = LocalField { surface: &s, field: &f, thickness: 2.0 };
        assert!(matches!(curl_local(&lf, 1.0, 1.0, 1.0, CurlOptions::default()), Err(Error::Domain(_))));
        let flat = CurvatureData::canonical(0.0, 0.0);
        assert_eq!(jacobian(10.0, &flat), 1.0);
    }

    #[test]
    fn constant_field_has_no_curl() {
        let e = Ellipsoid::new(1.0, 1.3, 0.8);
        let f = |_: &Vec3| Vec3::new(1.0, -2.0, 0.5);
        let lf = LocalField { surface: &e, field: &f, thickness: 0.2 };
        assert!(curl_local(&lf, 1.0, 1.0, 0.1, CurlOptions::default()).unwrap().norm() < 1e-9);
    }
}
