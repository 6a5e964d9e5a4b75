//! The five subcommands. Each returns an [`Outcome`]; none writes to disk.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::time::Instant;

use anyhow::{Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use skinlayer::blprofiles::{equation_residual, run_recursion, LayerState, SymbolAlgebra, Traces};
use skinlayer::geometry::{
    cartesian_fd_curl, curl_local, jacobian, tensor_identities, CurlOptions, Ellipsoid, LocalField, Mat3,
    ParametricSurface, Sphere, Torus, Vec3,
};
use skinlayer::gibc_symbols::{
    coercivity_scan, d3_unregularized, d_k, remainder_symbol, Family, Medium, ModeIndex, ScanGrid,
};
use skinlayer::golden;
use skinlayer::modal::{interior_decay, rate_study, Polarization, RateReport, StudyKind};
use skinlayer::polyexp::PolyExpProfile;
use skinlayer::Complex64;

use crate::config::RunConfig;
use crate::report::{csv, gnuplot_script, num, Curve, Outcome};

/// Accepted range of a fitted slope. Open ends are `None`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Window {
    pub min: Option<f64>,
    pub max: Option<f64>,
}

impl Window {
    fn around(centre: f64, tol: f64) -> Self {
        Self { min: Some(centre - tol), max: Some(centre + tol) }
    }

    fn at_least(min: f64) -> Self {
        Self { min: Some(min), max: None }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.min.is_none_or(|m| x >= m) && self.max.is_none_or(|m| x <= m)
    }
}

impl std::fmt::Display for Window {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.min, self.max) {
            (Some(a), Some(b)) => write!(f, "[{a:.2}, {b:.2}]"),
            (Some(a), None) => write!(f, ">= {a:.2}"),
            (None, Some(b)) => write!(f, "<= {b:.2}"),
            (None, None) => write!(f, "any"),
        }
    }
}

/// Declared slope window for order `k`. The k = 1 GIBC window is one-sided:
/// on a sphere `D^{δ,1}` and `D^{δ,2}` coincide, so order 1 converges like order 2.
pub fn slope_window(kind: StudyKind, k: usize) -> Window {
    match (kind, k) {
        (StudyKind::Gibc, 0) => Window::around(1.0, 0.2),
        (StudyKind::Gibc, 1) => Window::at_least(2.7),
        (StudyKind::Gibc, 2) => Window::around(3.0, 0.3),
        (StudyKind::Gibc, _) => Window::around(4.0, 0.4),
        (StudyKind::Truncation, _) => Window::at_least(k as f64 + 0.85),
    }
}

#[derive(Serialize)]
struct RateEntry {
    #[serde(flatten)]
    report: RateReport,
    window: Window,
    pass: bool,
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(";")
}

fn pol_label(pols: &[Polarization]) -> String {
    pols.iter().map(|p| p.as_str()).collect::<Vec<_>>().join(";")
}

fn csv_name(kind: StudyKind, k: usize) -> String {
    match kind {
        StudyKind::Gibc => format!("rates_k{k}.csv"),
        StudyKind::Truncation => format!("truncation_k{k}.csv"),
    }
}

/// GIBC and truncated-expansion rate studies for every configured order.
pub fn cmd_rates(cfg: &RunConfig) -> Result<Outcome> {
    let start = Instant::now();
    let mut o = Outcome::new("rates");
    let deltas = cfg.deltas_descending();
    let base = cfg.problem_config(deltas[0]);
    let (modes, pols) = (&cfg.sweep.modes, &cfg.sweep.polarizations);
    let (all_modes, all_pols) = (join(modes), pol_label(pols));
    let mut entries: BTreeMap<&str, Vec<RateEntry>> = BTreeMap::new();
    let mut curves = Vec::new();

    for (kind, label) in [(StudyKind::Gibc, "gibc"), (StudyKind::Truncation, "truncation")] {
        for &k in &cfg.sweep.orders {
            let mut rows = Vec::new();
            for &n in modes {
                for &pol in pols {
                    let single = rate_study(&base, k, &deltas, &[n], &[pol], kind)
                        .with_context(|| format!("{label} rate study, k={k}"))?;
                    rows.extend(single.points.iter().map(|p| {
                        vec![k.to_string(), num(p.delta), num(p.error), n.to_string(), pol.as_str().to_string()]
                    }));
                }
            }
            let report = rate_study(&base, k, &deltas, modes, pols, kind)
                .with_context(|| format!("{label} rate study, k={k}"))?;
            rows.extend(
                report
                    .points
                    .iter()
                    .map(|p| vec![k.to_string(), num(p.delta), num(p.error), all_modes.clone(), all_pols.clone()]),
            );
            let window = slope_window(kind, k);
            let pass = window.contains(report.slope);
            o.check(pass, format!("{label} k={k}: slope {:.3} (window {window})", report.slope));
            if report.near_resonance {
                o.note(format!("{label} k={k}: near a resonance, condition {:.3e}", report.max_condition));
            }
            let file = csv_name(kind, k);
            o.artifact(&file, csv(&["k", "delta", "error", "modes", "polarization"], rows)?);
            curves.push(Curve {
                file,
                x: 2,
                y: 3,
                filter: Some((4, all_modes.clone())),
                title: format!("{label} k={k}"),
            });
            entries.entry(label).or_default().push(RateEntry { report, window, pass });
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    o.note(format!("runtime {elapsed:.3} s, single-threaded"));
    o.artifact("rates.gp", gnuplot_script("rates.png", "skin depth delta", "exterior H(curl) error", "xy", &curves));
    o.set_summary(&json!({
        "config": cfg,
        "gibc": entries.remove("gibc").unwrap_or_default(),
        "truncation": entries.remove("truncation").unwrap_or_default(),
    }))?;
    o.artifacts.push(("summary.json".into(), serde_json::to_string_pretty(&o.summary)? + "\n"));
    Ok(o)
}

/// Polynomial degree ignoring coefficients below `1e-12` of the largest.
fn numerical_degree(p: &PolyExpProfile) -> usize {
    let big = p.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    p.coeffs().iter().rposition(|c| c.norm() > 1e-12 * big).unwrap_or(0)
}

/// Largest excess of `deg H^k` over `k` and of `deg Ê^k` over `k + 1`; `<= 0` when the law holds.
fn degree_excess(st: &LayerState) -> i64 {
    let mut worst = i64::MIN;
    for k in 0..=st.order() {
        for p in &st.h[k].0 {
            worst = worst.max(numerical_degree(p) as i64 - k as i64);
        }
        for p in &st.e_hat[k].0 {
            worst = worst.max(numerical_degree(p) as i64 - k as i64 - 1);
        }
    }
    worst
}

fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn random_traces(rng: &mut ChaCha8Rng, count: usize) -> Traces {
    (0..count).map(|_| [random_complex(rng), random_complex(rng)]).collect()
}

fn random_algebra(rng: &mut ChaCha8Rng) -> SymbolAlgebra {
    let mut pair = || [random_complex(rng), random_complex(rng)];
    let (rot, rot_cap, rot_m, rot_cap_m) = (pair(), pair(), pair(), pair());
    SymbolAlgebra::general(
        rng.gen_range(-2.0..2.0),
        rng.gen_range(-2.0..2.0),
        rot,
        rot_cap,
        rot_m,
        rot_cap_m,
        rng.gen_range(0.5..2.0),
        rng.gen_range(1.0..3.0),
    )
}

#[derive(Default)]
struct ProfileTally {
    displays: BTreeMap<String, f64>,
    residual: f64,
    degree_excess: i64,
}

impl ProfileTally {
    fn add(&mut self, alg: &SymbolAlgebra, traces: &Traces) -> Result<()> {
        let st = run_recursion(alg, traces, 3)?;
        self.residual = self.residual.max(equation_residual(alg, &st)?);
        self.degree_excess = self.degree_excess.max(degree_excess(&st));
        for (name, dev) in golden::display_deviations(alg, traces)? {
            let e = self.displays.entry(name).or_insert(0.0);
            *e = e.max(dev);
        }
        Ok(())
    }

    fn report(&self, o: &mut Outcome, source: &str, tol: f64, rows: &mut Vec<Vec<String>>) {
        for (name, &dev) in &self.displays {
            rows.push(vec![source.to_string(), name.clone(), num(dev)]);
        }
        let worst = self.displays.values().copied().fold(0.0, f64::max);
        o.check(worst <= tol, format!("{source}: largest display deviation {worst:.3e}"));
        o.check(self.residual <= tol, format!("{source}: layer equation residual {:.3e}", self.residual));
        o.check(
            self.degree_excess <= 0,
            format!("{source}: degree law deg H^k <= k, deg E^(k+1) <= k+1 (excess {})", self.degree_excess),
        );
        rows.push(vec![source.to_string(), "layer_equations".into(), num(self.residual)]);
    }
}

/// Golden comparisons, then the recursion against the closed-form displays
/// on random symbol algebras and on sphere modes.
pub fn cmd_profiles_check(cfg: &RunConfig) -> Result<Outcome> {
    let mut o = Outcome::new("profiles-check");
    let tol = cfg.profiles.tolerance;
    let mut rows = Vec::new();
    let mut golden_worst = BTreeMap::new();
    for set in golden::sets()? {
        let mut worst: f64 = 0.0;
        for (name, dev) in golden::compare(&set)? {
            o.check(dev <= tol, format!("golden {}: {name} max deviation {dev:.3e}", set.name));
            rows.push(vec![format!("golden_{}", set.name), name, num(dev)]);
            worst = worst.max(dev);
        }
        golden_worst.insert(set.name, worst);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut random = ProfileTally::default();
    for _ in 0..cfg.profiles.random_cases {
        let alg = random_algebra(&mut rng);
        random.add(&alg, &random_traces(&mut rng, 4))?;
    }
    random.report(&mut o, &format!("random algebras x{}", cfg.profiles.random_cases), tol, &mut rows);

    let p = &cfg.problem;
    for n in 1..=cfg.profiles.sphere_max_mode {
        let mut t = ProfileTally::default();
        let alg = SymbolAlgebra::sphere(n, p.radius, p.omega, p.eps_r)?;
        t.add(&alg, &random_traces(&mut rng, 4))?;
        t.report(&mut o, &format!("sphere n={n}"), tol, &mut rows);
    }

    o.artifact("profiles.csv", csv(&["source", "display", "max_deviation"], rows)?);
    o.set_summary(&json!({ "config": cfg, "tolerance": tol, "golden_max_deviation": golden_worst }))?;
    Ok(o)
}

#[derive(Serialize)]
struct RemainderSummary {
    deltas: Vec<f64>,
    max_identity_error: f64,
    max_weighted_remainder: f64,
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let step = (hi / lo).ln() / (points - 1) as f64;
    (0..points).map(|i| lo * (step * i as f64).exp()).collect()
}

/// Continuity and coercivity scans of the impedance symbols, and the
/// remainder identity and bound for order 3.
pub fn cmd_symbol_check(cfg: &RunConfig) -> Result<Outcome> {
    let mut o = Outcome::new("symbol-check");
    let s = &cfg.symbols;
    let medium = Medium { eps_r: cfg.problem.eps_r, omega: cfg.problem.omega };
    let radius = cfg.problem.radius;
    let grid = ScanGrid {
        delta_max: s.delta_max,
        delta_points: s.delta_points,
        lambda_max: s.lambda_max,
        lambda_points: s.lambda_points,
    };
    let mut scans = Vec::new();
    for &k in &cfg.sweep.orders {
        if k == 0 {
            o.note("k=0: the impedance operator vanishes, nothing to scan");
            continue;
        }
        let r = coercivity_scan(k, &grid, &medium, radius)?;
        o.check(r.c2 > 0.0, format!("k={k}: C2 = {:.6} > 0 for delta <= {}", r.c2, s.delta_max));
        match k {
            1 | 2 => {
                let exact = (r.c1 - 1.0).abs() <= 1e-15 && (r.c2 - FRAC_1_SQRT_2).abs() <= 1e-15;
                o.check(exact, format!("k={k}: C1 = {:.15}, C2 = {:.15} (1 and sqrt(2)/2)", r.c1, r.c2));
            }
            _ if s.delta_max <= 0.3 => {
                o.check(r.c2 >= 0.35 && r.c1 <= 1.2, format!("k=3: C1 = {:.4} <= 1.2, C2 = {:.4} >= 0.35", r.c1, r.c2));
            }
            _ => o.note(format!("k=3: C1 = {:.4}, C2 = {:.4}; bounds apply for delta <= 0.3 only", r.c1, r.c2)),
        }
        if let Some(t) = r.min_term_re {
            let terms: Vec<String> = t.iter().map(|x| format!("{x:.3e}")).collect();
            o.note(format!("k=3: smallest real part per term [{}]", terms.join(", ")));
        }
        let mut buf = Vec::new();
        r.write_csv(&mut buf)?;
        o.artifact(format!("symbols_k{k}.csv"), String::from_utf8(buf)?);
        scans.push(r);
    }

    let lambdas = log_grid(2.0 / (radius * radius), s.lambda_max.max(2.0 / (radius * radius) * 2.0), s.lambda_points);
    let (mut worst_id, mut worst_w) = (0.0f64, 0.0f64);
    let mut rows = Vec::new();
    for &delta in &s.remainder_deltas {
        for &lambda in &lambdas {
            for family in Family::BOTH {
                let mode = ModeIndex { n: 1, family, radius: (2.0 / lambda).sqrt() };
                let diff = (d_k(3, delta, &mode, &medium)?.value - d3_unregularized(delta, &mode, &medium).value)
                    / delta.powi(5);
                let r = remainder_symbol(delta, &mode);
                let id = (diff - r).norm() / r.norm().max(1.0);
                let w = r.norm() / (1.0 + lambda).powi(2);
                worst_id = worst_id.max(id);
                worst_w = worst_w.max(w);
                rows.push(vec![num(delta), num(lambda), family.as_str().into(), num(id), num(w)]);
            }
        }
    }
    o.check(
        worst_id <= s.remainder_tolerance,
        format!("remainder identity (d3 - d3_unregularized)/delta^5 = R: max relative error {worst_id:.3e}"),
    );
    o.check(worst_w <= 1.0, format!("(1+lambda)^-2 weighted remainder: max {worst_w:.4} <= 1"));
    o.artifact(
        "symbols_remainder.csv",
        csv(&["delta", "lambda", "family", "identity_error", "weighted_remainder"], rows)?,
    );
    let remainder = RemainderSummary {
        deltas: s.remainder_deltas.clone(),
        max_identity_error: worst_id,
        max_weighted_remainder: worst_w,
    };
    o.set_summary(&json!({ "config": cfg, "scans": scans, "remainder": remainder }))?;
    Ok(o)
}

/// Smooth analytic field with a known curl.
fn probe_field(x: &Vec3) -> Vec3 {
    Vec3::new(x.y.sin() + x.z * x.z, x.x * x.z, x.x.cos() * x.y)
}

fn probe_field_curl(x: &Vec3) -> Vec3 {
    Vec3::new(x.x.cos() - x.x, 2.0 * x.z + x.y * x.x.sin(), x.z - x.y.cos())
}

fn random_point(rng: &mut ChaCha8Rng, s: &dyn ParametricSurface) -> (f64, f64) {
    let ([u0, u1], [v0, v1]) = s.parameter_box();
    (rng.gen_range(u0..u1), rng.gen_range(v0..v1))
}

/// Curvature tensor identities on three surfaces, then the local-coordinate
/// curl against Cartesian differences and its step convergence on the ellipsoid.
pub fn cmd_curl_check(cfg: &RunConfig) -> Result<Outcome> {
    let mut o = Outcome::new("curl-check");
    let c = &cfg.curl;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let sphere = Sphere { radius: cfg.problem.radius };
    let ellipsoid = Ellipsoid::new(1.0, 1.3, 0.8);
    let torus = Torus { major: 2.0, minor: 0.6 };
    let surfaces: [&dyn ParametricSurface; 3] = [&sphere, &ellipsoid, &torus];

    let mut geo_rows = Vec::new();
    let mut identity_worst = BTreeMap::new();
    for s in surfaces {
        let mut worst: f64 = 0.0;
        for _ in 0..c.points {
            let (u, v) = random_point(&mut rng, s);
            let cd = s.curvature_data(u, v);
            let nu = rng.gen_range(0.0..0.9 * cd.default_thickness().min(1.0));
            let tensors = tensor_identities(&cd, nu).max_residual();
            let det = (Mat3::identity() + cd.curvature_tensor() * nu).determinant();
            let jac = (jacobian(nu, &cd) - det).abs();
            worst = worst.max(tensors).max(jac);
            geo_rows.push(vec![s.name().into(), num(u), num(v), num(nu), num(tensors), num(jac)]);
        }
        o.check(
            worst <= c.identity_tolerance,
            format!("{}: M = 2H - C, MC = G, J = det(I + nu C) at {} points, max residual {worst:.3e}", s.name(), c.points),
        );
        identity_worst.insert(s.name().to_string(), worst);
    }

    let mut curl_rows = Vec::new();
    let (mut worst_fd, mut worst_exact) = (0.0f64, 0.0f64);
    for _ in 0..c.points {
        let (u, v) = random_point(&mut rng, &ellipsoid);
        let thickness = ellipsoid.curvature_data(u, v).default_thickness();
        let nu = rng.gen_range(0.0..0.8 * thickness);
        let lf = LocalField { surface: &ellipsoid, field: &probe_field, thickness };
        let got = curl_local(&lf, u, v, nu, CurlOptions { step: c.step, richardson: true })?;
        let x = ellipsoid.point(u, v) + ellipsoid.normal(u, v) * nu;
        let fd = cartesian_fd_curl(&probe_field, &x, c.step, true);
        let exact = probe_field_curl(&x);
        let (e_fd, e_exact) = ((got - fd).norm() / fd.norm(), (got - exact).norm() / exact.norm());
        worst_fd = worst_fd.max(e_fd);
        worst_exact = worst_exact.max(e_exact);
        curl_rows.push(vec![num(u), num(v), num(nu), num(e_fd), num(e_exact)]);
    }
    o.check(worst_fd <= c.tolerance, format!("ellipsoid: local curl vs Cartesian differences, max relative error {worst_fd:.3e}"));
    o.check(worst_exact <= c.tolerance, format!("ellipsoid: local curl vs analytic curl, max relative error {worst_exact:.3e}"));

    let (u, v, nu) = (0.8, 0.3, 0.05);
    let thickness = ellipsoid.curvature_data(u, v).default_thickness();
    let lf = LocalField { surface: &ellipsoid, field: &probe_field, thickness };
    let exact = probe_field_curl(&(ellipsoid.point(u, v) + ellipsoid.normal(u, v) * nu));
    let err = |h: f64| -> Result<f64> {
        Ok((curl_local(&lf, u, v, nu, CurlOptions { step: h, richardson: false })? - exact).norm())
    };
    let [h0, h1] = c.order_steps;
    let order = (err(h0)? / err(h1)?).ln() / (h0 / h1).ln();
    o.check(
        (order - 2.0).abs() <= c.order_tolerance,
        format!("ellipsoid: observed step order {order:.3} without extrapolation (steps {h0}, {h1})"),
    );

    o.artifact("geometry.csv", csv(&["surface", "u", "v", "nu", "tensor_residual", "jacobian_residual"], geo_rows)?);
    o.artifact("curl_check.csv", csv(&["u", "v", "nu", "fd_relative_error", "exact_relative_error"], curl_rows)?);
    o.set_summary(&json!({
        "config": cfg,
        "identity_residual": identity_worst,
        "curl_fd_relative_error": worst_fd,
        "curl_exact_relative_error": worst_exact,
        "observed_order": order,
    }))?;
    Ok(o)
}

/// Log-linear fit of the interior field amplitude against depth.
pub fn cmd_decay_check(cfg: &RunConfig) -> Result<Outcome> {
    let mut o = Outcome::new("decay-check");
    let d = &cfg.decay;
    let pc = cfg.problem_config(d.delta);
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    let mut curves = Vec::new();
    for &pol in &cfg.sweep.polarizations {
        let fit = interior_decay(&pc, d.mode, pol, d.depth_max, d.samples)
            .with_context(|| format!("decay fit, n={} {}", d.mode, pol.as_str()))?;
        o.check(
            fit.relative_error <= d.tolerance,
            format!(
                "n={} {}: decay rate {:.4} vs 1/(sqrt(2) delta) = {:.4}, relative error {:.3}%",
                d.mode,
                pol.as_str(),
                fit.measured_rate,
                fit.expected_rate,
                100.0 * fit.relative_error
            ),
        );
        rows.extend(
            fit.depths
                .iter()
                .zip(&fit.log_amplitude)
                .map(|(&x, &y)| vec![pol.as_str().to_string(), num(x), num(y)]),
        );
        curves.push(Curve {
            file: "decay.csv".into(),
            x: 2,
            y: 3,
            filter: Some((1, pol.as_str().into())),
            title: format!("{} n={}", pol.as_str(), d.mode),
        });
        fits.push(json!({ "polarization": pol, "fit": fit }));
    }
    o.artifact("decay.csv", csv(&["polarization", "depth", "log_amplitude"], rows)?);
    o.artifact("decay.gp", gnuplot_script("decay.png", "depth R - r", "log |E_T|", "", &curves));
    o.set_summary(&json!({ "config": cfg, "fits": fits }))?;
    Ok(o)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows() {
        assert!(slope_window(StudyKind::Gibc, 0).contains(1.15));
        assert!(!slope_window(StudyKind::Gibc, 0).contains(1.25));
        assert!(slope_window(StudyKind::Gibc, 1).contains(2.93));
        assert!(!slope_window(StudyKind::Gibc, 3).contains(3.5));
        assert!(slope_window(StudyKind::Truncation, 2).contains(2.9));
        assert!(!slope_window(StudyKind::Truncation, 2).contains(2.8));
        assert_eq!(slope_window(StudyKind::Gibc, 1).to_string(), ">= 2.70");
    }

    #[test]
    fn numerical_degree_ignores_roundoff() {
        let p = PolyExpProfile::new(vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0), Complex64::new(1e-17, 0.0)]);
        assert_eq!(numerical_degree(&p), 1);
        assert_eq!(numerical_degree(&PolyExpProfile::zero()), 0);
    }
}
