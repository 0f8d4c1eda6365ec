use rand_core::RngCore;
use serde::{Deserialize, Serialize};

use super::state::ReadState;
use crate::error::{Error, Result};
use crate::model::{Source, SourcePair};
use crate::rng::coin;

/// How a greedy policy resolves epochs where both sources promise the
/// same expected gain.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TieBreak {
    #[default]
    PreferR,
    PreferS,
    /// R on the first tie, S on the second, and so on.
    AlternateFromR,
    /// R with probability `p`.
    Random { p: f64 },
}

impl TieBreak {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TieBreak::Random { p } if !(0.0..=1.0).contains(&p) => Err(Error::InvalidParameter(
                format!("tie probability {p} outside [0, 1]"),
            )),
            _ => Ok(()),
        }
    }

    pub fn is_memoryless(&self) -> bool {
        !matches!(self, TieBreak::AlternateFromR)
    }
}

/// Rule selecting the source of the next record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PolicySpec {
    /// R on odd epochs, S on even epochs.
    Alternating,
    /// R when `Γ_S > Γ_R`, S when `Γ_S < Γ_R`.
    Greedy {
        #[serde(default)]
        tie: TieBreak,
    },
    /// R when `Γ_S > Γ_R + delta`, S when `Γ_S < Γ_R + delta`.
    GreedyOffset {
        delta: f64,
        #[serde(default)]
        tie: TieBreak,
    },
    /// R with probability `alpha`, independently each epoch.
    Bernoulli { alpha: f64 },
    /// R on the first epoch; afterwards R with probability `alpha1` while the
    /// R count is at least `alpha` times the epochs so far, else `alpha2`.
    Restorative { alpha: f64, alpha1: f64, alpha2: f64 },
}

impl PolicySpec {
    pub fn greedy() -> Self {
        PolicySpec::Greedy {
            tie: TieBreak::PreferR,
        }
    }

    pub fn validate(&self, pair: &SourcePair) -> Result<()> {
        let open_unit = |name: &str, x: f64| {
            if x > 0.0 && x < 1.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} = {x} outside (0, 1)")))
            }
        };
        match *self {
            PolicySpec::Alternating => Ok(()),
            PolicySpec::Greedy { tie } => tie.validate(),
            PolicySpec::GreedyOffset { delta, tie } => {
                let gamma = pair.float_moments().gamma;
                // written this way so a NaN offset is rejected too
                #[allow(clippy::neg_cmp_op_on_partial_ord)]
                if !(delta.abs() <= gamma) {
                    return Err(Error::InvalidParameter(format!(
                        "offset {delta} outside [-{gamma}, {gamma}]"
                    )));
                }
                tie.validate()
            }
            PolicySpec::Bernoulli { alpha } => open_unit("alpha", alpha),
            PolicySpec::Restorative {
                alpha,
                alpha1,
                alpha2,
            } => {
                open_unit("alpha", alpha)?;
                open_unit("alpha1", alpha1)?;
                open_unit("alpha2", alpha2)?;
                if alpha1 < alpha && alpha < alpha2 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "need alpha1 < alpha < alpha2, got {alpha1}, {alpha}, {alpha2}"
                    )))
                }
            }
        }
    }

    /// Short name used in file names and reports.
    pub fn name(&self) -> String {
        match self {
            PolicySpec::Alternating => "alternating".into(),
            PolicySpec::Greedy { .. } => "greedy".into(),
            PolicySpec::GreedyOffset { delta, .. } => format!("greedy-offset-{delta}"),
            PolicySpec::Bernoulli { alpha } => format!("bernoulli-{alpha}"),
            PolicySpec::Restorative { alpha, .. } => format!("restorative-{alpha}"),
        }
    }
}

/// Stateful decision maker for one run of a policy.
///
/// Only the `AlternateFromR` tie rule carries memory (the number of ties
/// seen so far).
#[derive(Debug, Clone)]
pub struct Chooser {
    spec: PolicySpec,
    ties_seen: u64,
}

impl Chooser {
    pub fn new(spec: PolicySpec, pair: &SourcePair) -> Result<Self> {
        spec.validate(pair)?;
        Ok(Self { spec, ties_seen: 0 })
    }

    pub fn spec(&self) -> &PolicySpec {
        &self.spec
    }

    /// Source of epoch `state.epochs() + 1`.
    pub fn choose<R: RngCore + ?Sized>(&mut self, state: &ReadState, rng: &mut R) -> Source {
        match self.spec {
            PolicySpec::Alternating => {
                if state.epochs().is_multiple_of(2) {
                    Source::R
                } else {
                    Source::S
                }
            }
            PolicySpec::Greedy { tie } => {
                match state.gamma_s_units().cmp(&state.gamma_r_units()) {
                    std::cmp::Ordering::Greater => Source::R,
                    std::cmp::Ordering::Less => Source::S,
                    std::cmp::Ordering::Equal => self.resolve_tie(tie, rng),
                }
            }
            PolicySpec::GreedyOffset { delta, tie } => {
                let lead = -state.delta_units() as f64;
                let offset = delta * state.scale() as f64;
                if lead > offset {
                    Source::R
                } else if lead < offset {
                    Source::S
                } else {
                    self.resolve_tie(tie, rng)
                }
            }
            PolicySpec::Bernoulli { alpha } => pick(coin(rng, alpha)),
            PolicySpec::Restorative {
                alpha,
                alpha1,
                alpha2,
            } => {
                let n = state.epochs();
                if n == 0 {
                    return Source::R;
                }
                let p = if state.r_count() as f64 >= alpha * n as f64 {
                    alpha1
                } else {
                    alpha2
                };
                pick(coin(rng, p))
            }
        }
    }

    fn resolve_tie<R: RngCore + ?Sized>(&mut self, tie: TieBreak, rng: &mut R) -> Source {
        match tie {
            TieBreak::PreferR => Source::R,
            TieBreak::PreferS => Source::S,
            TieBreak::AlternateFromR => {
                self.ties_seen += 1;
                pick(self.ties_seen % 2 == 1)
            }
            TieBreak::Random { p } => pick(coin(rng, p)),
        }
    }
}

fn pick(read_r: bool) -> Source {
    if read_r {
        Source::R
    } else {
        Source::S
    }
}
