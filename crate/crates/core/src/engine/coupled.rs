//! Greedy and alternating run side by side on shared label streams.
//!
//! Each source has one label tape indexed by read count. The `j`-th R read
//! of either policy sees the same label, so `M_G(n) - M_A(n)` compares the
//! two policies path by path.

use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use super::policy::{Chooser, PolicySpec, TieBreak};
use super::run::{EpochRecord, LabelTape};
use super::state::ReadState;
use crate::error::{Error, Result};
use crate::model::{Source, SourcePair};
use crate::rng::{stream_rng, STREAM_POLICY};

/// Diagnostics recorded at every epoch of a coupled run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoupledRecord {
    pub greedy: EpochRecord,
    pub alternating: EpochRecord,
    /// `Γ_R[R_G(n)] - Γ_S[S_G(n)]`.
    pub delta: f64,
    /// Epoch at which greedy first commits to a record the alternating
    /// policy has not read by epoch `n`; equals `n` if it never does.
    pub t_n: u64,
    /// `R_G(T_n) = ceil(n / 2)`.
    pub a_n: bool,
    pub g_n: f64,
    /// `M_G(n) - M_A(n)`.
    pub d: i64,
}

impl CoupledRecord {
    pub fn epoch(&self) -> u64 {
        self.greedy.epoch
    }
}

#[derive(Debug, Clone)]
pub struct CoupledTrace {
    pub seed: u64,
    pub tie: TieBreak,
    pub records: Vec<CoupledRecord>,
}

impl CoupledTrace {
    pub fn greedy_records(&self) -> Vec<EpochRecord> {
        self.records.iter().map(|r| r.greedy).collect()
    }

    pub fn alternating_records(&self) -> Vec<EpochRecord> {
        self.records.iter().map(|r| r.alternating).collect()
    }
}

/// Streaming coupled run. Memory grows with the epoch count only through
/// the label tapes and the greedy hitting-time tables.
#[derive(Debug, Clone)]
pub struct CoupledRunner<'a> {
    pair: &'a SourcePair,
    greedy_chooser: Chooser,
    alternating_chooser: Chooser,
    r_tape: LabelTape,
    s_tape: LabelTape,
    policy_rng: ChaCha20Rng,
    greedy: ReadState,
    alternating: ReadState,
    /// `greedy_r[k] = R_G(k)`.
    greedy_r: Vec<u64>,
    /// `first_r[m]` is the first epoch with `R_G = m`.
    first_r: Vec<u64>,
    first_s: Vec<u64>,
}

impl<'a> CoupledRunner<'a> {
    pub fn new(pair: &'a SourcePair, seed: u64, tie: TieBreak) -> Result<Self> {
        Ok(Self {
            pair,
            greedy_chooser: Chooser::new(PolicySpec::Greedy { tie }, pair)?,
            alternating_chooser: Chooser::new(PolicySpec::Alternating, pair)?,
            r_tape: LabelTape::new(seed, Source::R),
            s_tape: LabelTape::new(seed, Source::S),
            policy_rng: stream_rng(seed, STREAM_POLICY),
            greedy: ReadState::new(pair),
            alternating: ReadState::new(pair),
            greedy_r: vec![0],
            first_r: vec![0],
            first_s: vec![0],
        })
    }

    pub fn greedy(&self) -> &ReadState {
        &self.greedy
    }

    pub fn alternating(&self) -> &ReadState {
        &self.alternating
    }

    pub fn step(&mut self) -> Result<CoupledRecord> {
        let pair = self.pair;
        let g_choice = self.greedy_chooser.choose(&self.greedy, &mut self.policy_rng);
        let g_index = self.greedy.count(g_choice) + 1;
        let g_label = self.tape(g_choice).label(pair, g_index);
        self.greedy.step(pair, g_choice, g_label)?;

        let a_choice = self
            .alternating_chooser
            .choose(&self.alternating, &mut self.policy_rng);
        let a_index = self.alternating.count(a_choice) + 1;
        let a_label = self.tape(a_choice).label(pair, a_index);
        self.alternating.step(pair, a_choice, a_label)?;

        let n = self.greedy.epochs();
        self.greedy_r.push(self.greedy.r_count());
        match g_choice {
            Source::R if self.greedy.r_count() as usize == self.first_r.len() => self.first_r.push(n),
            Source::S if self.greedy.s_count() as usize == self.first_s.len() => self.first_s.push(n),
            _ => {}
        }

        let half_up = n.div_ceil(2);
        let target = (half_up + 1) as usize;
        let hit = [self.first_r.get(target), self.first_s.get(target)]
            .into_iter()
            .flatten()
            .min()
            .copied();
        let t_n = hit.map_or(n, |j| (j - 1).min(n));
        let a_n = self.greedy_r[t_n as usize] == half_up;

        // Both case-wise forms of 2 G_n equal
        // Γ_R[R_G] + Γ_S[S_G] - Γ_R[floor(n/2)] - Γ_S[floor(n/2)].
        let half_down = n / 2;
        let base_r = self.r_tape.prefix_units(pair, half_down);
        let base_s = self.s_tape.prefix_units(pair, half_down);
        let twice_g = (self.greedy.gamma_r_units() + self.greedy.gamma_s_units()) as i128
            - (base_r + base_s) as i128;
        let g_n = twice_g as f64 / (2.0 * pair.scale() as f64);

        Ok(CoupledRecord {
            greedy: EpochRecord::capture(&self.greedy, g_choice, g_label),
            alternating: EpochRecord::capture(&self.alternating, a_choice, a_label),
            delta: self.greedy.delta(),
            t_n,
            a_n,
            g_n,
            d: self.greedy.matches() as i64 - self.alternating.matches() as i64,
        })
    }

    fn tape(&mut self, source: Source) -> &mut LabelTape {
        match source {
            Source::R => &mut self.r_tape,
            Source::S => &mut self.s_tape,
        }
    }
}

/// Runs greedy (with `tie`) and alternating on shared streams.
pub fn run_coupled(
    pair: &SourcePair,
    n_epochs: u64,
    seed: u64,
    tie: TieBreak,
) -> Result<CoupledTrace> {
    if n_epochs < 2 {
        return Err(Error::InvalidParameter("coupled runs need at least 2 epochs".into()));
    }
    let mut runner = CoupledRunner::new(pair, seed, tie)?;
    let records = (0..n_epochs)
        .map(|_| runner.step())
        .collect::<Result<Vec<_>>>()?;
    Ok(CoupledTrace { seed, tie, records })
}

/// `T_n` and the event `A_n`, computed directly from a greedy trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StoppingTime {
    pub t: u64,
    pub a: bool,
}

/// `T_n = min(n, inf{k >= 1 : S_G(k+1) = ceil(n/2) + 1 or R_G(k+1) = ceil(n/2) + 1})`.
pub fn stopping_time(greedy: &[EpochRecord], n: u64) -> Result<StoppingTime> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if (greedy.len() as u64) < n {
        return Err(Error::TraceTooShort {
            len: greedy.len(),
            needed: n as usize,
        });
    }
    let half_up = n.div_ceil(2);
    let t = (1..n)
        .find(|&k| {
            let next = &greedy[k as usize]; // epoch k + 1
            next.r == half_up + 1 || next.s == half_up + 1
        })
        .unwrap_or(n);
    let a = greedy[t as usize - 1].r == half_up;
    Ok(StoppingTime { t, a })
}
