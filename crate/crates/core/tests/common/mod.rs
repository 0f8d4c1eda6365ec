//! Helpers shared by the integration tests: random rational pairs and a
//! brute-force expectation oracle that walks every label sequence.
#![allow(dead_code)]

pub mod props;

use joinpolicy::model::{LabelDistribution, Source, SourcePair};
use joinpolicy::rational::{ratio, Rational};
use joinpolicy::rng::SplitMix64;
use num_bigint::BigInt;

/// Random composition of `total` into `parts` nonnegative integers.
fn composition(rng: &mut SplitMix64, total: u64, parts: usize) -> Vec<u64> {
    let mut cuts: Vec<u64> = (0..parts - 1).map(|_| rng.next_u64() % (total + 1)).collect();
    cuts.sort_unstable();
    let mut out = Vec::with_capacity(parts);
    let mut prev = 0;
    for c in cuts {
        out.push(c - prev);
        prev = c;
    }
    out.push(total - prev);
    out
}

fn distribution(weights: &[u64], total: u64) -> LabelDistribution {
    LabelDistribution::new(weights.iter().map(|&w| ratio(w as i64, total as i64)).collect())
        .expect("valid weights")
}

/// Deterministic random pair with support in `2..=max_support` and
/// denominators in `2..=max_den`, redrawn until the overlap is positive.
pub fn random_pair(seed: u64, max_support: usize, max_den: u64) -> SourcePair {
    let mut rng = SplitMix64::new(seed);
    loop {
        let k = 2 + (rng.next_u64() % (max_support as u64 - 1)) as usize;
        let dr = 2 + rng.next_u64() % (max_den - 1);
        let ds = 2 + rng.next_u64() % (max_den - 1);
        let r = composition(&mut rng, dr, k);
        let s = composition(&mut rng, ds, k);
        if let Ok(pair) = SourcePair::new(distribution(&r, dr), distribution(&s, ds)) {
            return pair;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OraclePolicy {
    GreedyPreferR,
    GreedyPreferS,
    Alternating,
}

struct Walk<'a> {
    r: Vec<u128>,
    s: Vec<u128>,
    policy: OraclePolicy,
    pair: &'a SourcePair,
    total: u128,
}

impl Walk<'_> {
    /// Adds `weight * M` over all continuations; probabilities are
    /// numerators over `D` per step.
    #[allow(clippy::too_many_arguments)]
    fn go(
        &mut self,
        left: usize,
        epoch: u64,
        n_r: &mut Vec<u64>,
        n_s: &mut Vec<u64>,
        gamma_r: u128,
        gamma_s: u128,
        matches: u64,
        weight: u128,
    ) {
        if left == 0 {
            self.total += weight * matches as u128;
            return;
        }
        let source = match self.policy {
            OraclePolicy::Alternating => {
                if epoch.is_multiple_of(2) {
                    Source::R
                } else {
                    Source::S
                }
            }
            OraclePolicy::GreedyPreferR | OraclePolicy::GreedyPreferS => {
                if gamma_s > gamma_r {
                    Source::R
                } else if gamma_s < gamma_r {
                    Source::S
                } else if self.policy == OraclePolicy::GreedyPreferR {
                    Source::R
                } else {
                    Source::S
                }
            }
        };
        let k = n_r.len();
        for label in 0..k {
            let (p, other_p) = match source {
                Source::R => (self.r[label], self.s[label]),
                Source::S => (self.s[label], self.r[label]),
            };
            if p == 0 {
                continue;
            }
            let w = weight * p;
            match source {
                Source::R => {
                    let gain = n_s[label];
                    n_r[label] += 1;
                    self.go(left - 1, epoch + 1, n_r, n_s, gamma_r + other_p, gamma_s, matches + gain, w);
                    n_r[label] -= 1;
                }
                Source::S => {
                    let gain = n_r[label];
                    n_s[label] += 1;
                    self.go(left - 1, epoch + 1, n_r, n_s, gamma_r, gamma_s + other_p, matches + gain, w);
                    n_s[label] -= 1;
                }
            }
        }
        let _ = self.pair;
    }
}

/// `E M(n)` by summing over every label sequence the policy can see.
pub fn enumerate_expectation(pair: &SourcePair, n: usize, policy: OraclePolicy) -> Rational {
    let d = pair.scale() as u128;
    let mut walk = Walk {
        r: pair.r_units().iter().map(|&x| x as u128).collect(),
        s: pair.s_units().iter().map(|&x| x as u128).collect(),
        policy,
        pair,
        total: 0,
    };
    let k = pair.support();
    walk.go(n, 0, &mut vec![0; k], &mut vec![0; k], 0, 0, 0, 1);
    let denom = num_traits::pow(BigInt::from(d), n);
    Rational::new(BigInt::from(walk.total), denom)
}
