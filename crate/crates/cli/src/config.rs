//! Experiment configuration files.
//!
//! Configs are JSON. Probabilities are `"p/q"` strings so exact inputs
//! survive the round trip.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use joinpolicy::engine::{PolicySpec, TieBreak};
use joinpolicy::model::PairDefinition;
use joinpolicy::SourcePair;
use serde::{Deserialize, Serialize};

use crate::suites::Suite;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Simulate,
    Exact,
    Verify,
    Compare,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Simulate => "simulate",
            Command::Exact => "exact",
            Command::Verify => "verify",
            Command::Compare => "compare",
        })
    }
}

/// Where the label distributions come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PairSource {
    /// `"illustrative"` or `"uniform-K"`.
    Named(String),
    Inline(PairDefinition),
    File { file: PathBuf },
}

impl PairSource {
    /// Resolves the pair; relative file paths are taken from `base`.
    pub fn load(&self, base: &Path) -> Result<SourcePair> {
        match self {
            PairSource::Named(name) if name == "illustrative" => Ok(SourcePair::illustrative()),
            PairSource::Named(name) => {
                let k = name
                    .strip_prefix("uniform-")
                    .and_then(|k| k.parse::<usize>().ok())
                    .with_context(|| format!("unknown named pair {name:?}"))?;
                Ok(SourcePair::uniform(k)?)
            }
            PairSource::Inline(def) => Ok(SourcePair::from_definition(def)?),
            PairSource::File { file } => {
                let path = base.join(file);
                let text = std::fs::read_to_string(&path)
                    .with_context(|| format!("reading pair file {}", path.display()))?;
                let def: PairDefinition = serde_json::from_str(&text)
                    .with_context(|| format!("parsing pair file {}", path.display()))?;
                Ok(SourcePair::from_definition(&def)?)
            }
        }
    }
}

/// Acceptance tolerances; every field can be overridden in the config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub selection_variance_rel: f64,
    pub selection_ks: f64,
    pub match_variance_rel: f64,
    pub match_ks: f64,
    pub bernoulli_variance_rel: f64,
    pub gap_rel: f64,
    /// Optional absolute bound on `gap/n - limit`, off unless configured.
    pub gap_abs: Option<f64>,
    pub parity_abs: f64,
    pub stopping_ks: f64,
    pub mixture_ks: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            selection_variance_rel: 0.05,
            selection_ks: 0.02,
            match_variance_rel: 0.10,
            match_ks: 0.02,
            bernoulli_variance_rel: 0.10,
            gap_rel: 0.01,
            gap_abs: None,
            parity_abs: 1e-6,
            stopping_ks: 0.03,
            mixture_ks: 0.05,
        }
    }
}

impl Tolerances {
    fn validate(&self) -> Result<()> {
        let all = [
            ("selection_variance_rel", self.selection_variance_rel),
            ("selection_ks", self.selection_ks),
            ("match_variance_rel", self.match_variance_rel),
            ("match_ks", self.match_ks),
            ("bernoulli_variance_rel", self.bernoulli_variance_rel),
            ("gap_rel", self.gap_rel),
            ("gap_abs", self.gap_abs.unwrap_or(1.0)),
            ("parity_abs", self.parity_abs),
            ("stopping_ks", self.stopping_ks),
            ("mixture_ks", self.mixture_ks),
        ];
        for (name, x) in all {
            if !(x > 0.0 && x.is_finite()) {
                bail!("tolerance {name} must be positive, got {x}");
            }
        }
        Ok(())
    }
}

/// Sizes used by the `verify` suites beyond `n_epochs` and `replications`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySettings {
    /// Horizon of the exact gap, parity and sandwich checks.
    pub exact_horizon: usize,
    /// Smallest `n` of the sandwich check.
    pub sandwich_from: usize,
    /// Largest horizon of the dynamic-programming certificate.
    pub dp_horizon: usize,
    pub bernoulli_alpha: f64,
    pub hoeffding_t: Vec<f64>,
    /// One-sided level of the Clopper-Pearson bound.
    pub hoeffding_alpha: f64,
    /// Paths in the sign pilot and in the sign check itself.
    pub sign_reps: usize,
}

impl Default for VerifySettings {
    fn default() -> Self {
        Self {
            exact_horizon: 2000,
            sandwich_from: 100,
            dp_horizon: 8,
            bernoulli_alpha: 0.3,
            hoeffding_t: vec![1.0, 4.0, 9.0, 16.0],
            hoeffding_alpha: 0.01,
            sign_reps: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub id: String,
    #[serde(default)]
    pub command: Option<Command>,
    pub pair: PairSource,
    /// Policies for `simulate`; greedy and alternating when empty.
    #[serde(default)]
    pub policies: Vec<PolicySpec>,
    #[serde(default = "default_epochs")]
    pub n_epochs: u64,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Tie rule of the greedy side of coupled runs and of the exact chain.
    #[serde(default)]
    pub tie: TieBreak,
    /// Suites for `verify`; all of them when empty.
    #[serde(default)]
    pub suites: Vec<Suite>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub verify: VerifySettings,
    /// Per-replication trace files written by `simulate` and `compare`.
    #[serde(default = "default_max_traces")]
    pub max_traces: usize,
}

fn default_epochs() -> u64 {
    10_000
}

fn default_replications() -> usize {
    10_000
}

fn default_seed() -> u64 {
    20070101
}

fn default_max_traces() -> usize {
    10
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty()
            || !self
                .id
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.')
        {
            bail!("experiment id {:?} must be nonempty and use [A-Za-z0-9._-]", self.id);
        }
        if self.replications < 1 {
            bail!("replications must be at least 1");
        }
        if self.n_epochs < 1 {
            bail!("n_epochs must be at least 1");
        }
        self.tie.validate()?;
        self.tolerances.validate()?;
        let v = &self.verify;
        if v.exact_horizon < 8 || v.sandwich_from < 1 || v.sandwich_from > v.exact_horizon {
            bail!("need 8 <= exact_horizon and 1 <= sandwich_from <= exact_horizon");
        }
        if v.dp_horizon < 1 {
            bail!("dp_horizon must be at least 1");
        }
        if !(v.bernoulli_alpha > 0.0 && v.bernoulli_alpha < 1.0) {
            bail!("bernoulli_alpha must lie in (0, 1)");
        }
        if !(v.hoeffding_alpha > 0.0 && v.hoeffding_alpha < 1.0) {
            bail!("hoeffding_alpha must lie in (0, 1)");
        }
        if v.sign_reps < 1 {
            bail!("sign_reps must be at least 1");
        }
        Ok(())
    }

    pub fn policies_or_default(&self) -> Vec<PolicySpec> {
        if self.policies.is_empty() {
            vec![PolicySpec::Greedy { tie: self.tie }, PolicySpec::Alternating]
        } else {
            self.policies.clone()
        }
    }

    pub fn suites_or_all(&self) -> Vec<Suite> {
        if self.suites.is_empty() {
            Suite::ALL.to_vec()
        } else {
            self.suites.clone()
        }
    }
}
