use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use super::policy::{Chooser, PolicySpec};
use super::state::ReadState;
use crate::error::{Error, Result};
use crate::model::{Source, SourcePair};
use crate::rng::{stream_rng, STREAM_POLICY, STREAM_R, STREAM_S};

/// Sequential label stream of one source: the `j`-th call returns
/// `L(j)`, the label on the `j`-th record read from that source.
#[derive(Debug, Clone)]
pub struct LabelStream {
    source: Source,
    rng: ChaCha20Rng,
    drawn: u64,
}

impl LabelStream {
    pub fn new(seed: u64, source: Source) -> Self {
        let id = match source {
            Source::R => STREAM_R,
            Source::S => STREAM_S,
        };
        Self {
            source,
            rng: stream_rng(seed, id),
            drawn: 0,
        }
    }

    pub fn next_label(&mut self, pair: &SourcePair) -> usize {
        self.drawn += 1;
        pair.dist(self.source).sample(&mut self.rng)
    }

    pub fn drawn(&self) -> u64 {
        self.drawn
    }
}

/// A label stream that remembers what it produced, with prefix sums of
/// the match yields, so several policies can read it by index.
#[derive(Debug, Clone)]
pub struct LabelTape {
    stream: LabelStream,
    labels: Vec<u32>,
    /// `prefix[j]` is Γ over the first `j` labels, in units of `1 / D`.
    prefix: Vec<u128>,
}

impl LabelTape {
    pub fn new(seed: u64, source: Source) -> Self {
        Self {
            stream: LabelStream::new(seed, source),
            labels: Vec::new(),
            prefix: vec![0],
        }
    }

    /// Label of the record with 1-based read index `index`.
    pub fn label(&mut self, pair: &SourcePair, index: u64) -> usize {
        self.extend_to(pair, index);
        self.labels[index as usize - 1] as usize
    }

    /// Γ over the first `count` records.
    pub fn prefix_units(&mut self, pair: &SourcePair, count: u64) -> u128 {
        self.extend_to(pair, count);
        self.prefix[count as usize]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    fn extend_to(&mut self, pair: &SourcePair, count: u64) {
        while (self.labels.len() as u64) < count {
            let label = self.stream.next_label(pair);
            let last = *self.prefix.last().expect("prefix starts at zero");
            self.prefix
                .push(last + u128::from(pair.yield_units(self.stream.source, label)));
            self.labels.push(label as u32);
        }
    }
}

/// One row of a policy trace, taken after the epoch's read.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpochRecord {
    pub epoch: u64,
    pub choice: Source,
    pub label: usize,
    #[serde(rename = "R")]
    pub r: u64,
    #[serde(rename = "S")]
    pub s: u64,
    #[serde(rename = "M")]
    pub m: u64,
    #[serde(rename = "gammaR")]
    pub gamma_r: f64,
    #[serde(rename = "gammaS")]
    pub gamma_s: f64,
}

impl EpochRecord {
    pub(crate) fn capture(state: &ReadState, choice: Source, label: usize) -> Self {
        Self {
            epoch: state.epochs(),
            choice,
            label,
            r: state.r_count(),
            s: state.s_count(),
            m: state.matches(),
            gamma_r: state.gamma_r(),
            gamma_s: state.gamma_s(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trace {
    pub seed: u64,
    pub policy: PolicySpec,
    pub records: Vec<EpochRecord>,
    pub final_state: ReadState,
}

/// Step-by-step execution of one policy on fresh label streams.
#[derive(Debug, Clone)]
pub struct Runner<'a> {
    pair: &'a SourcePair,
    chooser: Chooser,
    r_stream: LabelStream,
    s_stream: LabelStream,
    policy_rng: ChaCha20Rng,
    state: ReadState,
}

impl<'a> Runner<'a> {
    pub fn new(pair: &'a SourcePair, policy: PolicySpec, seed: u64) -> Result<Self> {
        Ok(Self {
            pair,
            chooser: Chooser::new(policy, pair)?,
            r_stream: LabelStream::new(seed, Source::R),
            s_stream: LabelStream::new(seed, Source::S),
            policy_rng: stream_rng(seed, STREAM_POLICY),
            state: ReadState::new(pair),
        })
    }

    pub fn step(&mut self) -> Result<EpochRecord> {
        let choice = self.chooser.choose(&self.state, &mut self.policy_rng);
        let label = match choice {
            Source::R => self.r_stream.next_label(self.pair),
            Source::S => self.s_stream.next_label(self.pair),
        };
        self.state.step(self.pair, choice, label)?;
        Ok(EpochRecord::capture(&self.state, choice, label))
    }

    /// Advances to epoch `n` without recording.
    pub fn advance_to(&mut self, n: u64) -> Result<&ReadState> {
        while self.state.epochs() < n {
            self.step()?;
        }
        Ok(&self.state)
    }

    pub fn state(&self) -> &ReadState {
        &self.state
    }
}

/// Runs `policy` for `n_epochs` epochs and records every epoch.
pub fn run_policy(
    pair: &SourcePair,
    policy: PolicySpec,
    n_epochs: u64,
    seed: u64,
) -> Result<Trace> {
    if n_epochs == 0 {
        return Err(Error::InvalidParameter("n_epochs must be at least 1".into()));
    }
    let mut runner = Runner::new(pair, policy, seed)?;
    let records = (0..n_epochs)
        .map(|_| runner.step())
        .collect::<Result<Vec<_>>>()?;
    Ok(Trace {
        seed,
        policy,
        records,
        final_state: runner.state,
    })
}
