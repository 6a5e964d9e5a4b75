//! Run configuration: built-in defaults, an optional TOML file, then flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};
use skinlayer::modal::{Polarization, ProblemConfig};

/// Environment variable that replaces the output directory, flag included.
pub const OUT_ENV: &str = "SKINLAYER_OUT";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemSection {
    pub radius: f64,
    pub radius_out: f64,
    pub omega: f64,
    pub eps_r: f64,
}

impl Default for ProblemSection {
    fn default() -> Self {
        Self { radius: 1.0, radius_out: 2.0, omega: 1.0, eps_r: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub deltas: Vec<f64>,
    pub orders: Vec<usize>,
    pub modes: Vec<usize>,
    pub polarizations: Vec<Polarization>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            deltas: vec![0.08, 0.04, 0.02, 0.01],
            orders: vec![0, 1, 2, 3],
            modes: vec![1, 2, 3],
            polarizations: Polarization::BOTH.to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SymbolSection {
    pub delta_max: f64,
    pub delta_points: usize,
    pub lambda_max: f64,
    pub lambda_points: usize,
    /// Skin depths at which `(d_3 - d_3,0)/δ⁵` is compared with the remainder symbol.
    pub remainder_deltas: Vec<f64>,
    pub remainder_tolerance: f64,
}

impl Default for SymbolSection {
    fn default() -> Self {
        Self {
            delta_max: 0.3,
            delta_points: 60,
            lambda_max: 1e6,
            lambda_points: 200,
            remainder_deltas: vec![0.1, 0.2, 0.3],
            remainder_tolerance: 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfilesSection {
    pub random_cases: usize,
    pub sphere_max_mode: usize,
    pub tolerance: f64,
}

impl Default for ProfilesSection {
    fn default() -> Self {
        Self { random_cases: 100, sphere_max_mode: 5, tolerance: 1e-10 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CurlSection {
    pub points: usize,
    pub step: f64,
    pub tolerance: f64,
    pub identity_tolerance: f64,
    /// Steps of the plain central-difference order estimate, coarse first.
    pub order_steps: [f64; 2],
    pub order_tolerance: f64,
}

impl Default for CurlSection {
    fn default() -> Self {
        Self {
            points: 100,
            step: 1e-3,
            tolerance: 1e-6,
            identity_tolerance: 1e-13,
            order_steps: [2e-2, 1e-2],
            order_tolerance: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecaySection {
    pub delta: f64,
    pub mode: usize,
    pub depth_max: f64,
    pub samples: usize,
    pub tolerance: f64,
}

impl Default for DecaySection {
    fn default() -> Self {
        Self { delta: 0.01, mode: 1, depth_max: 0.1, samples: 51, tolerance: 0.05 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub out: PathBuf,
    pub problem: ProblemSection,
    pub sweep: SweepSection,
    pub symbols: SymbolSection,
    pub profiles: ProfilesSection,
    pub curl: CurlSection,
    pub decay: DecaySection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            out: PathBuf::from("skinlayer-out"),
            problem: ProblemSection::default(),
            sweep: SweepSection::default(),
            symbols: SymbolSection::default(),
            profiles: ProfilesSection::default(),
            curl: CurlSection::default(),
            decay: DecaySection::default(),
        }
    }
}

/// Values given on the command line. `None` leaves the file or default value.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub deltas: Option<Vec<f64>>,
    pub orders: Option<Vec<usize>>,
    pub modes: Option<Vec<usize>>,
    pub seed: Option<u64>,
}

/// Comma-separated list. An empty string is an empty list, which
/// [`RunConfig::validate`] then rejects where a list is required.
pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<T>().with_context(|| format!("invalid list entry {t:?}")))
        .collect()
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).context("invalid configuration file")
    }

    /// Defaults, then `file`, then `overrides`, then the environment
    /// variable [`OUT_ENV`] for the output directory. Validated.
    pub fn resolve(file: Option<&Path>, overrides: &Overrides, out_env: Option<String>) -> Result<Self> {
        let mut cfg = match file {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                Self::from_toml(&text).with_context(|| format!("in {}", p.display()))?
            }
            None => Self::default(),
        };
        cfg.apply(overrides);
        if let Some(dir) = out_env.filter(|s| !s.is_empty()) {
            cfg.out = PathBuf::from(dir);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = &o.out {
            self.out = v.clone();
        }
        if let Some(v) = &o.deltas {
            self.sweep.deltas = v.clone();
        }
        if let Some(v) = &o.orders {
            self.sweep.orders = v.clone();
        }
        if let Some(v) = &o.modes {
            self.sweep.modes = v.clone();
        }
        if let Some(v) = o.seed {
            self.seed = v;
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.problem_config(self.sweep.deltas.first().copied().unwrap_or(0.01))
            .validate()
            .context("invalid [problem] section")?;
        let s = &self.sweep;
        ensure!(!s.deltas.is_empty(), "the delta list is empty");
        ensure!(s.deltas.iter().all(|d| d.is_finite() && *d > 0.0), "delta values must be positive");
        ensure!(!s.orders.is_empty(), "the order list is empty");
        if let Some(k) = s.orders.iter().find(|&&k| k > 3) {
            bail!("order {k} requested; orders 0 to 3 are available");
        }
        ensure!(!s.modes.is_empty(), "the mode list is empty");
        ensure!(!s.modes.contains(&0), "mode numbers start at 1");
        ensure!(!s.polarizations.is_empty(), "the polarization list is empty");
        let sy = &self.symbols;
        ensure!(sy.delta_max > 0.0 && sy.delta_points > 0 && sy.lambda_points > 1, "invalid [symbols] grid");
        ensure!(sy.remainder_deltas.iter().all(|d| *d > 0.0), "remainder deltas must be positive");
        ensure!(self.profiles.sphere_max_mode > 0, "[profiles] sphere_max_mode must be at least 1");
        let c = &self.curl;
        ensure!(c.step > 0.0 && c.order_steps.iter().all(|h| *h > 0.0), "curl steps must be positive");
        let d = &self.decay;
        ensure!(d.delta > 0.0 && d.mode > 0 && d.samples > 1, "invalid [decay] section");
        ensure!(d.depth_max > 0.0 && d.depth_max < self.problem.radius, "decay depth must lie in (0, R)");
        Ok(())
    }

    /// Sweep skin depths, largest first, without repeats.
    pub fn deltas_descending(&self) -> Vec<f64> {
        let mut d = self.sweep.deltas.clone();
        d.sort_by(|a, b| b.total_cmp(a));
        d.dedup();
        d
    }

    pub fn problem_config(&self, delta: f64) -> ProblemConfig {
        let p = &self.problem;
        ProblemConfig { radius: p.radius, radius_out: p.radius_out, omega: p.omega, eps_r: p.eps_r, delta }
    }
}
