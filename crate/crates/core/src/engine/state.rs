use crate::error::{Error, Result};
use crate::model::{Source, SourcePair};

/// Per-epoch state of one reading policy.
///
/// `Γ_R` and `Γ_S` are held as integer multiples of `1 / D` where `D` is
/// the pair's scale, so they are exact and greedy comparisons never see
/// rounding noise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReadState {
    n: u64,
    r_count: u64,
    s_count: u64,
    n_r: Vec<u64>,
    n_s: Vec<u64>,
    gamma_r: u128,
    gamma_s: u128,
    matches: u64,
    scale: u64,
}

impl ReadState {
    pub fn new(pair: &SourcePair) -> Self {
        Self {
            n: 0,
            r_count: 0,
            s_count: 0,
            n_r: vec![0; pair.support()],
            n_s: vec![0; pair.support()],
            gamma_r: 0,
            gamma_s: 0,
            matches: 0,
            scale: pair.scale(),
        }
    }

    /// Reads one record with `label` from `choice` and returns the match gain.
    ///
    /// The gain is the count of the same label already read from the other
    /// source.
    pub fn step(&mut self, pair: &SourcePair, choice: Source, label: usize) -> Result<u64> {
        let support = self.n_r.len();
        if label >= support {
            return Err(Error::LabelOutOfRange { label, support });
        }
        let units = u128::from(pair.yield_units(choice, label));
        let gain = match choice {
            Source::R => {
                self.n_r[label] += 1;
                self.r_count += 1;
                self.gamma_r += units;
                self.n_s[label]
            }
            Source::S => {
                self.n_s[label] += 1;
                self.s_count += 1;
                self.gamma_s += units;
                self.n_r[label]
            }
        };
        self.matches += gain;
        self.n += 1;
        Ok(gain)
    }

    pub fn epochs(&self) -> u64 {
        self.n
    }

    pub fn r_count(&self) -> u64 {
        self.r_count
    }

    pub fn s_count(&self) -> u64 {
        self.s_count
    }

    pub fn count(&self, source: Source) -> u64 {
        match source {
            Source::R => self.r_count,
            Source::S => self.s_count,
        }
    }

    pub fn n_r(&self) -> &[u64] {
        &self.n_r
    }

    pub fn n_s(&self) -> &[u64] {
        &self.n_s
    }

    pub fn matches(&self) -> u64 {
        self.matches
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    pub fn gamma_r_units(&self) -> u128 {
        self.gamma_r
    }

    pub fn gamma_s_units(&self) -> u128 {
        self.gamma_s
    }

    pub fn gamma_r(&self) -> f64 {
        self.gamma_r as f64 / self.scale as f64
    }

    pub fn gamma_s(&self) -> f64 {
        self.gamma_s as f64 / self.scale as f64
    }

    /// `Γ_R - Γ_S` in units of `1 / D`.
    pub fn delta_units(&self) -> i128 {
        self.gamma_r as i128 - self.gamma_s as i128
    }

    pub fn delta(&self) -> f64 {
        self.delta_units() as f64 / self.scale as f64
    }

    /// Match count recomputed from the label-count vectors.
    pub fn recount_matches(&self) -> u64 {
        self.n_r.iter().zip(&self.n_s).map(|(a, b)| a * b).sum()
    }

    /// Γ sums recomputed from the label-count vectors.
    pub fn recount_gammas(&self, pair: &SourcePair) -> (u128, u128) {
        let dot = |counts: &[u64], units: &[u64]| {
            counts
                .iter()
                .zip(units)
                .map(|(&c, &u)| u128::from(c) * u128::from(u))
                .sum::<u128>()
        };
        (dot(&self.n_r, pair.s_units()), dot(&self.n_s, pair.r_units()))
    }
}
