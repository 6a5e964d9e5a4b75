//! Recursion against profiles generated symbolically by `golden/gen_golden.py`.

use std::collections::HashMap;
use std::path::PathBuf;

use num_complex::Complex64;
use skinlayer::blprofiles::{displays, run_recursion, trace_ek_cross_n, LayerState, SymbolAlgebra, Traces};
use skinlayer::polyexp::{PolyExpProfile, ProfileVector};

const TOL: f64 = 1e-12;
const SETS: [&str; 3] = ["sphere_n1_R1", "sphere_n3_R2", "general"];

fn dir(set: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(set)
}

fn rows(path: PathBuf) -> Vec<Vec<String>> {
    std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("{}: {e}", path.display()))
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.split_whitespace().map(str::to_owned).collect())
        .collect()
}

fn num(re: &str, im: &str) -> Complex64 {
    Complex64::new(re.parse().unwrap(), im.parse().unwrap())
}

fn load_profile(set: &str, name: &str) -> ProfileVector {
    let mut coeffs = vec![Vec::<Complex64>::new(); 3];
    for r in rows(dir(set).join(name)) {
        let (comp, j): (usize, usize) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        if coeffs[comp].len() <= j {
            coeffs[comp].resize(j + 1, Complex64::new(0.0, 0.0));
        }
        coeffs[comp][j] = num(&r[2], &r[3]);
    }
    let mut it = coeffs.into_iter().map(PolyExpProfile::new);
    ProfileVector([it.next().unwrap(), it.next().unwrap(), it.next().unwrap()])
}

fn load(set: &str) -> (SymbolAlgebra, Traces) {
    let p: HashMap<String, Complex64> = rows(dir(set).join("params.txt")).into_iter().map(|r| (r[0].clone(), num(&r[1], &r[2]))).collect();
    let pair = |a: &str| [p[&format!("{a}1")], p[&format!("{a}2")]];
    let alg = SymbolAlgebra::general(p["c1"].re, p["c2"].re, pair("r"), pair("p"), pair("m"), pair("q"), p["omega"].re, p["eps_r"].re);
    let traces = (0..4).map(|l| pair(&format!("a{l}_"))).collect();
    (alg, traces)
}

fn solved(set: &str) -> (SymbolAlgebra, Traces, LayerState) {
    let (alg, t) = load(set);
    let st = run_recursion(&alg, &t, 3).unwrap();
    (alg, t, st)
}

#[test]
fn recursion_matches_symbolic_profiles() {
    for set in SETS {
        let (_, _, st) = solved(set);
        for k in 0..=3 {
            let e = st.e_hat[k].max_coeff_diff(&load_profile(set, &format!("E{k}.txt")));
            let h = st.h[k].max_coeff_diff(&load_profile(set, &format!("H{k}.txt")));
            assert!(e < TOL && h < TOL, "{set} order {k}: E {e:e}, H {h:e}");
        }
    }
}

#[test]
fn traces_match_symbolic_values() {
    for set in SETS {
        let (_, _, st) = solved(set);
        for l in 1..=3 {
            let want = nalgebra::Vector3::from(load_profile(set, &format!("trace{l}.txt")).evaluate(0.0));
            let got = trace_ek_cross_n(&st, l).unwrap();
            assert!((got - want).norm() < TOL, "{set} trace {l}: {got} vs {want}");
        }
    }
}

#[test]
fn closed_form_displays_match() {
    for set in SETS {
        let (alg, t, st) = solved(set);
        let (e0, h0) = displays::order0(&alg, t[0]);
        assert!(st.e_hat[0].max_coeff_diff(&e0) < TOL && st.h[0].max_coeff_diff(&h0) < TOL, "{set} order 0");

        let (en, hn) = displays::order1_normal(&alg, t[0]);
        assert!((st.e_hat[1].0[2].coeff(0) - en).norm() < TOL, "{set} E^1·n");
        assert!((st.h[1].0[2].coeff(0) - hn).norm() < TOL, "{set} H^1·n");

        let tangential = |p: &ProfileVector| ProfileVector([p.0[0].clone(), p.0[1].clone(), PolyExpProfile::zero()]);
        let cross = |p: &ProfileVector| ProfileVector([p.0[1].clone(), -&p.0[0], PolyExpProfile::zero()]);
        assert!(tangential(&st.h[1]).max_coeff_diff(&displays::h1_tangential(&alg, &t)) < TOL, "{set} H^1_T");
        assert!(cross(&st.e_hat[1]).max_coeff_diff(&displays::e1_cross_n(&alg, &t)) < TOL, "{set} Ê^1 x n");
        assert!(tangential(&st.h[2]).max_coeff_diff(&displays::h2_tangential(&alg, &t)) < TOL, "{set} H^2_T");
        assert!(cross(&st.e_hat[2]).max_coeff_diff(&displays::e2_cross_n(&alg, &t)) < TOL, "{set} Ê^2 x n");
        for l in 1..=3 {
            assert!((displays::trace(&alg, &t, l) - trace_ek_cross_n(&st, l).unwrap()).norm() < TOL, "{set} trace {l}");
        }
    }
}
