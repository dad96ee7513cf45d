//! Experiment configuration: a JSON document whose every field is optional.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use gpnl_core::gaussian::cutoff_for_squeezings;
use gpnl_core::reduction::JmaxPolicy;
use gpnl_core::{GaussianSpec, NumberConservingOp, C64};
use serde::{Deserialize, Serialize};

/// The pipeline a run dispatches to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    GbsProb,
    Amplitude,
    Reconstruct,
    Hadamard,
    VerifyAll,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::GbsProb => "gbs-prob",
            Kind::Amplitude => "amplitude",
            Kind::Reconstruct => "reconstruct",
            Kind::Hadamard => "hadamard",
            Kind::VerifyAll => "verify-all",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InstanceParams {
    /// Modes.
    pub m: usize,
    /// Squeezed input modes.
    pub k: usize,
    pub r: f64,
    /// Target photon number.
    pub n: usize,
    /// Constant in `N* = (4 sinh² r + 2)(log 2 / 2 · K + c N log N)`.
    pub c: f64,
    /// Ancilla amplitude as `[re, im]`.
    pub alpha: [f64; 2],
    /// Evaluation times.
    pub t: Vec<f64>,
    /// Largest displacement modulus of random Hadamard instances.
    pub d_max: f64,
    /// Seed of the Haar interferometer; derived from the master seed if absent.
    pub seed: Option<u64>,
}

impl Default for InstanceParams {
    fn default() -> Self {
        Self { m: 4, k: 3, r: 0.4, n: 2, c: 1.0, alpha: [0.8, 0.0], t: vec![0.5], d_max: 0.25, seed: None }
    }
}

impl InstanceParams {
    pub fn alpha(&self) -> C64 {
        C64::new(self.alpha[0], self.alpha[1])
    }
}

/// Exactly one of an explicit total-photon cutoff or a squeezing tail threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CutoffPolicy {
    Explicit(usize),
    TailThreshold(f64),
}

impl Default for CutoffPolicy {
    fn default() -> Self {
        Self::TailThreshold(gpnl_core::gaussian::DEFAULT_TAIL_THRESHOLD)
    }
}

impl CutoffPolicy {
    pub fn resolve(&self, squeezings: &[f64]) -> usize {
        match *self {
            Self::Explicit(n) => n,
            Self::TailThreshold(x) => cutoff_for_squeezings(squeezings, x),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Output directory; `--out` takes precedence.
    pub dir: Option<PathBuf>,
    /// CSV file (relative to the output directory) for amplitude series.
    pub series_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Hafnian vs Fock-engine outcome probabilities.
    pub oracle: f64,
    /// Pair distribution vs Fock-engine photon histogram.
    pub distribution: f64,
    /// Slack on `|Q - P| ≤ aliasing` at the formula `J_max`.
    pub reconstruction: f64,
    /// `|Q - P|` under the aliasing-free `J_max`.
    pub fallback: f64,
    /// Recovered vs direct Hadamard amplitude.
    pub hadamard: f64,
    /// Circuit Λ vs its direct construction.
    pub lambda: f64,
    /// Measured vs closed-form Hadamard probabilities.
    pub expansion: f64,
    /// Recovered amplitude vs the reduction module's amplitude.
    pub theorem2: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            oracle: 1e-8,
            distribution: 1e-12,
            reconstruction: 1e-9,
            fallback: 1e-10,
            hadamard: 1e-6,
            lambda: 1e-8,
            expansion: 1e-8,
            theorem2: 1e-6,
        }
    }
}

impl Tolerances {
    fn fields(&self) -> [(&'static str, f64); 8] {
        [
            ("oracle", self.oracle),
            ("distribution", self.distribution),
            ("reconstruction", self.reconstruction),
            ("fallback", self.fallback),
            ("hadamard", self.hadamard),
            ("lambda", self.lambda),
            ("expansion", self.expansion),
            ("theorem2", self.theorem2),
        ]
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            oracle: self.oracle * s,
            distribution: self.distribution * s,
            reconstruction: self.reconstruction * s,
            fallback: self.fallback * s,
            hadamard: self.hadamard * s,
            lambda: self.lambda * s,
            expansion: self.expansion * s,
            theorem2: self.theorem2 * s,
        }
    }
}

/// An explicit Hadamard-test instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HadamardConfig {
    pub psi_g: GaussianSpec,
    pub psi_g_prime: GaussianSpec,
    pub v: NumberConservingOp,
    #[serde(default)]
    pub system_cutoff: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Must agree with the subcommand when present.
    pub kind: Option<Kind>,
    pub seed: Option<u64>,
    pub instance: InstanceParams,
    pub cutoff: CutoffPolicy,
    pub output: OutputConfig,
    pub tolerances: Tolerances,
    /// DFT length policy for `reconstruct`.
    pub jmax: Option<JmaxPolicy>,
    /// Outcome for `gbs-prob`; all collision-free outcomes up to `n` photons otherwise.
    pub outcome: Option<Vec<u32>>,
    pub hadamard: Option<HadamardConfig>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).context("malformed configuration")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.instance;
        if p.m == 0 || p.k == 0 || p.k > p.m {
            bail!("instance: need 1 <= k <= m, got k = {}, m = {}", p.k, p.m);
        }
        if !(p.r.is_finite() && p.r >= 0.0) {
            bail!("instance.r must be finite and non-negative, got {}", p.r);
        }
        if p.n > p.m {
            bail!("instance.n = {} exceeds m = {}", p.n, p.m);
        }
        if !(p.c.is_finite() && p.c > 0.0) {
            bail!("instance.c must be positive, got {}", p.c);
        }
        if !(p.d_max.is_finite() && p.d_max >= 0.0) {
            bail!("instance.d_max must be finite and non-negative, got {}", p.d_max);
        }
        if !p.alpha.iter().all(|x| x.is_finite()) || p.t.iter().any(|t| !t.is_finite()) {
            bail!("instance.alpha and instance.t must be finite");
        }
        match self.cutoff {
            CutoffPolicy::Explicit(0) => bail!("cutoff.explicit must be positive"),
            CutoffPolicy::TailThreshold(x) if !(x > 0.0 && x < 1.0) => {
                bail!("cutoff.tail_threshold must lie in (0, 1), got {x}")
            }
            _ => {}
        }
        for (name, v) in self.tolerances.fields() {
            if !(v.is_finite() && v > 0.0) {
                bail!("tolerances.{name} must be positive, got {v}");
            }
        }
        if let Some(s) = &self.outcome {
            if s.len() != p.m {
                bail!("outcome has {} modes, instance.m = {}", s.len(), p.m);
            }
        }
        if let Some(JmaxPolicy::Fixed(0)) = self.jmax {
            bail!("jmax.fixed must be positive");
        }
        Ok(())
    }
}
