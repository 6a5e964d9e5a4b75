//! Symbolic reference profiles, generated by `tests/golden/gen_golden.py`
//! and embedded at build time.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::blprofiles::{displays, run_recursion, trace_ek_cross_n, CVec3, SymbolAlgebra, Traces};
use crate::error::{Error, Result};
use crate::polyexp::{PolyExpProfile, ProfileVector};

type Files = &'static [(&'static str, &'static str)];

const SETS: &[(&str, Files)] = &[
    ("sphere_n1_R1", &[
            ("E0", include_str!("../tests/golden/sphere_n1_R1/E0.txt")),
            ("E1", include_str!("../tests/golden/sphere_n1_R1/E1.txt")),
            ("E2", include_str!("../tests/golden/sphere_n1_R1/E2.txt")),
            ("E3", include_str!("../tests/golden/sphere_n1_R1/E3.txt")),
            ("H0", include_str!("../tests/golden/sphere_n1_R1/H0.txt")),
            ("H1", include_str!("../tests/golden/sphere_n1_R1/H1.txt")),
            ("H2", include_str!("../tests/golden/sphere_n1_R1/H2.txt")),
            ("H3", include_str!("../tests/golden/sphere_n1_R1/H3.txt")),
            ("trace1", include_str!("../tests/golden/sphere_n1_R1/trace1.txt")),
            ("trace2", include_str!("../tests/golden/sphere_n1_R1/trace2.txt")),
            ("trace3", include_str!("../tests/golden/sphere_n1_R1/trace3.txt")),
            ("params", include_str!("../tests/golden/sphere_n1_R1/params.txt")),
        ]),
    ("sphere_n3_R2", &[
            ("E0", include_str!("../tests/golden/sphere_n3_R2/E0.txt")),
            ("E1", include_str!("../tests/golden/sphere_n3_R2/E1.txt")),
            ("E2", include_str!("../tests/golden/sphere_n3_R2/E2.txt")),
            ("E3", include_str!("../tests/golden/sphere_n3_R2/E3.txt")),
            ("H0", include_str!("../tests/golden/sphere_n3_R2/H0.txt")),
            ("H1", include_str!("../tests/golden/sphere_n3_R2/H1.txt")),
            ("H2", include_str!("../tests/golden/sphere_n3_R2/H2.txt")),
            ("H3", include_str!("../tests/golden/sphere_n3_R2/H3.txt")),
            ("trace1", include_str!("../tests/golden/sphere_n3_R2/trace1.txt")),
            ("trace2", include_str!("../tests/golden/sphere_n3_R2/trace2.txt")),
            ("trace3", include_str!("../tests/golden/sphere_n3_R2/trace3.txt")),
            ("params", include_str!("../tests/golden/sphere_n3_R2/params.txt")),
        ]),
    ("general", &[
            ("E0", include_str!("../tests/golden/general/E0.txt")),
            ("E1", include_str!("../tests/golden/general/E1.txt")),
            ("E2", include_str!("../tests/golden/general/E2.txt")),
            ("E3", include_str!("../tests/golden/general/E3.txt")),
            ("H0", include_str!("../tests/golden/general/H0.txt")),
            ("H1", include_str!("../tests/golden/general/H1.txt")),
            ("H2", include_str!("../tests/golden/general/H2.txt")),
            ("H3", include_str!("../tests/golden/general/H3.txt")),
            ("trace1", include_str!("../tests/golden/general/trace1.txt")),
            ("trace2", include_str!("../tests/golden/general/trace2.txt")),
            ("trace3", include_str!("../tests/golden/general/trace3.txt")),
            ("params", include_str!("../tests/golden/general/params.txt")),
        ]),
];

/// One parameter set with its reference profiles.
#[derive(Clone, Debug)]
pub struct GoldenSet {
    pub name: &'static str,
    pub algebra: SymbolAlgebra,
    pub traces: Traces,
    /// `Ê^k`, `k = 0..=3`
    pub e_hat: Vec<ProfileVector>,
    /// `H_i^k`, `k = 0..=3`
    pub h: Vec<ProfileVector>,
    /// `E_i^l × n` at `η = 0`, `l = 1..=3`
    pub trace_e: Vec<CVec3>,
}

fn rows(text: &str) -> impl Iterator<Item = Vec<&str>> {
    text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()).map(|l| l.split_whitespace().collect())
}

fn parse(s: &str) -> Result<f64> {
    s.parse().map_err(|_| Error::Config(format!("bad number {s:?} in golden data")))
}

fn profile(text: &str) -> Result<ProfileVector> {
    let mut coeffs = vec![Vec::<Complex64>::new(); 3];
    for r in rows(text) {
        let (comp, j) = (parse(r[0])? as usize, parse(r[1])? as usize);
        if comp > 2 {
            return Err(Error::Config(format!("component {comp} in golden data")));
        }
        if coeffs[comp].len() <= j {
            coeffs[comp].resize(j + 1, Complex64::new(0.0, 0.0));
        }
        coeffs[comp][j] = Complex64::new(parse(r[2])?, parse(r[3])?);
    }
    let mut it = coeffs.into_iter().map(PolyExpProfile::new);
    Ok(ProfileVector([it.next().unwrap(), it.next().unwrap(), it.next().unwrap()]))
}

fn build(name: &'static str, files: Files) -> Result<GoldenSet> {
    let file = |f: &str| files.iter().find(|(k, _)| *k == f).map(|(_, t)| *t).unwrap_or("");
    let mut p = HashMap::new();
    for r in rows(file("params")) {
        p.insert(r[0].to_string(), Complex64::new(parse(r[1])?, parse(r[2])?));
    }
    let get = |k: &str| p.get(k).copied().ok_or_else(|| Error::Config(format!("missing {k} in {name}")));
    let pair = |a: &str| -> Result<[Complex64; 2]> { Ok([get(&format!("{a}1"))?, get(&format!("{a}2"))?]) };
    let algebra = SymbolAlgebra::general(get("c1")?.re, get("c2")?.re, pair("r")?, pair("p")?, pair("m")?, pair("q")?, get("omega")?.re, get("eps_r")?.re);
    let traces = (0..4).map(|l| pair(&format!("a{l}_"))).collect::<Result<_>>()?;
    let e_hat = (0..4).map(|k| profile(file(&format!("E{k}")))).collect::<Result<_>>()?;
    let h = (0..4).map(|k| profile(file(&format!("H{k}")))).collect::<Result<_>>()?;
    let trace_e = (1..4).map(|l| profile(file(&format!("trace{l}"))).map(|p| CVec3::from(p.evaluate(0.0)))).collect::<Result<_>>()?;
    Ok(GoldenSet { name, algebra, traces, e_hat, h, trace_e })
}

pub fn sets() -> Result<Vec<GoldenSet>> {
    SETS.iter().map(|(name, files)| build(name, files)).collect()
}

fn tangential(p: &ProfileVector) -> ProfileVector {
    ProfileVector([p.0[0].clone(), p.0[1].clone(), PolyExpProfile::zero()])
}

fn cross_n(p: &ProfileVector) -> ProfileVector {
    ProfileVector([p.0[1].clone(), -&p.0[0], PolyExpProfile::zero()])
}

/// Largest deviation of every closed-form display from the recursion.
pub fn display_deviations(alg: &SymbolAlgebra, t: &[[Complex64; 2]]) -> Result<Vec<(String, f64)>> {
    let st = run_recursion(alg, t, 2)?;
    let mut out = Vec::new();
    let (e0, h0) = displays::order0(alg, t[0]);
    out.push(("order0".into(), st.e_hat[0].max_coeff_diff(&e0).max(st.h[0].max_coeff_diff(&h0))));
    let (en, hn) = displays::order1_normal(alg, t[0]);
    out.push(("order1_normal".into(), (st.e_hat[1].0[2].coeff(0) - en).norm().max((st.h[1].0[2].coeff(0) - hn).norm())));
    out.push(("h1_tangential".into(), tangential(&st.h[1]).max_coeff_diff(&displays::h1_tangential(alg, t))));
    out.push(("e1_cross_n".into(), cross_n(&st.e_hat[1]).max_coeff_diff(&displays::e1_cross_n(alg, t))));
    out.push(("h2_tangential".into(), tangential(&st.h[2]).max_coeff_diff(&displays::h2_tangential(alg, t))));
    out.push(("e2_cross_n".into(), cross_n(&st.e_hat[2]).max_coeff_diff(&displays::e2_cross_n(alg, t))));
    for l in 1..=3 {
        out.push((format!("trace{l}"), (displays::trace(alg, t, l) - trace_ek_cross_n(&st, l)?).norm()));
    }
    Ok(out)
}

/// Largest coefficient deviation per comparison: the recursion against the
/// reference profiles and traces, then [`display_deviations`].
pub fn compare(set: &GoldenSet) -> Result<Vec<(String, f64)>> {
    let st = run_recursion(&set.algebra, &set.traces, 3)?;
    let mut out = Vec::new();
    for k in 0..=3 {
        out.push((format!("recursion E_hat^{k}"), st.e_hat[k].max_coeff_diff(&set.e_hat[k])));
        out.push((format!("recursion H^{k}"), st.h[k].max_coeff_diff(&set.h[k])));
    }
    for l in 1..=3 {
        out.push((format!("recursion trace{l}"), (trace_ek_cross_n(&st, l)? - set.trace_e[l - 1]).norm()));
    }
    out.extend(display_deviations(&set.algebra, &set.traces)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_sets_agree() {
        let sets = sets().unwrap();
        assert_eq!(sets.len(), 3);
        for s in &sets {
            for (name, dev) in compare(s).unwrap() {
                assert!(dev < 1e-12, "{} {name}: {dev:e}", s.name);
            }
        }
    }
}
