//! Radial quadrature rules built on Gauss–Legendre nodes.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

/// Default number of Gauss–Legendre nodes per interval.
pub const DEFAULT_NODES: usize = 64;

/// Nodes and weights of a composite rule on a real interval.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// `m`-point Gauss–Legendre on `[a, b]`.
    pub fn gauss_legendre(m: usize, a: f64, b: f64) -> Self {
        let mut rule = Rule { nodes: Vec::with_capacity(m), weights: Vec::with_capacity(m) };
        rule.push_panel(&GaussLegendre::new(NonZeroUsize::new(m.max(1)).unwrap()), a, b);
        rule
    }

    /// Panels accumulate toward `b`, sized for a boundary layer of width
    /// `width` under the end point: edges at `b - width·{0, 1, 2, 4, ...}`
    /// until `a` is reached.
    pub fn graded_toward(m: usize, a: f64, b: f64, width: f64) -> Self {
        let gl = GaussLegendre::new(NonZeroUsize::new(m.max(1)).unwrap());
        let mut rule = Rule { nodes: Vec::new(), weights: Vec::new() };
        let mut hi = b;
        let mut step = width.max(f64::MIN_POSITIVE);
        while hi > a {
            let lo = (hi - step).max(a);
            rule.push_panel(&gl, lo, hi);
            hi = lo;
            step *= 2.0;
        }
        rule
    }

    fn push_panel(&mut self, gl: &GaussLegendre, a: f64, b: f64) {
        let (half, mid) = (0.5 * (b - a), 0.5 * (b + a));
        for &(x, w) in gl.as_node_weight_pairs() {
            self.nodes.push(mid + half * x);
            self.weights.push(half * w);
        }
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}
