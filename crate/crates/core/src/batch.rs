//! Parallel replications with deterministic, index-ordered results.
//!
//! Replication `i` of master seed `m` always runs on seed
//! `seed_stream(m, i)`, and results are gathered by index, so the output
//! is independent of thread count and scheduling.

use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{CoupledRunner, PolicySpec, Runner, TieBreak};
use crate::error::{Error, Result};
use crate::model::SourcePair;
use crate::rng::seed_stream;
use crate::stats::SignTracker;

/// Runs `job(index, seed)` for `index in 0..reps` in parallel.
pub fn replicate<T, F>(master_seed: u64, reps: usize, job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, u64) -> Result<T> + Sync,
{
    (0..reps as u64)
        .into_par_iter()
        .map(|i| job(i, seed_stream(master_seed, i)))
        .collect()
}

/// End state of one single-policy replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PolicySummary {
    pub seed: u64,
    pub r: u64,
    pub s: u64,
    pub m: u64,
}

pub fn policy_batch(
    pair: &SourcePair,
    policy: PolicySpec,
    n: u64,
    reps: usize,
    master_seed: u64,
) -> Result<Vec<PolicySummary>> {
    policy.validate(pair)?;
    replicate(master_seed, reps, |_, seed| {
        let mut runner = Runner::new(pair, policy, seed)?;
        let st = runner.advance_to(n)?;
        Ok(PolicySummary {
            seed,
            r: st.r_count(),
            s: st.s_count(),
            m: st.matches(),
        })
    })
}

/// End state of one coupled replication plus its sign history.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoupledSummary {
    pub seed: u64,
    pub n: u64,
    /// `R_G(n)`.
    pub r_greedy: u64,
    pub m_greedy: u64,
    pub m_alternating: u64,
    pub t_n: u64,
    pub a_n: bool,
    /// `R_G(T_n)`.
    pub r_greedy_at_t: u64,
    pub g_n: f64,
    pub delta: f64,
    /// Largest `|Δ_k|` over the path.
    pub max_abs_delta: f64,
    pub signs: SignTracker,
}

impl CoupledSummary {
    pub fn d(&self) -> i64 {
        self.m_greedy as i64 - self.m_alternating as i64
    }
}

/// Runs one coupled path of `n` epochs without storing it.
pub fn coupled_summary(pair: &SourcePair, n: u64, seed: u64, tie: TieBreak) -> Result<CoupledSummary> {
    if n < 2 {
        return Err(Error::InvalidParameter("coupled runs need at least 2 epochs".into()));
    }
    let mut runner = CoupledRunner::new(pair, seed, tie)?;
    let mut signs = SignTracker::default();
    let mut r_history = Vec::with_capacity(n as usize + 1);
    r_history.push(0);
    let mut max_abs_delta = 0.0f64;
    let mut last = None;
    for _ in 0..n {
        let rec = runner.step()?;
        signs.update(rec.epoch(), rec.d);
        r_history.push(rec.greedy.r);
        max_abs_delta = max_abs_delta.max(rec.delta.abs());
        last = Some(rec);
    }
    let rec = last.expect("n >= 2");
    Ok(CoupledSummary {
        seed,
        n,
        r_greedy: rec.greedy.r,
        m_greedy: rec.greedy.m,
        m_alternating: rec.alternating.m,
        t_n: rec.t_n,
        a_n: rec.a_n,
        r_greedy_at_t: r_history[rec.t_n as usize],
        g_n: rec.g_n,
        delta: rec.delta,
        max_abs_delta,
        signs,
    })
}

pub fn coupled_batch(
    pair: &SourcePair,
    n: u64,
    reps: usize,
    master_seed: u64,
    tie: TieBreak,
) -> Result<Vec<CoupledSummary>> {
    replicate(master_seed, reps, |_, seed| coupled_summary(pair, n, seed, tie))
}
