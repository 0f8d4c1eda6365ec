//! Discounted total rewards `ν_λ = Σ_{n>=1} λ^n E ΔM(n)`.

use serde::Serialize;

use super::chain::{DeltaChain, DEFAULT_STATE_CAP};
use crate::engine::TieBreak;
use crate::error::{Error, Result};
use crate::model::SourcePair;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscountedValues {
    pub lambda: f64,
    pub nu_alternating: f64,
    pub nu_greedy: f64,
    /// Bound on the greedy terms dropped by truncation.
    pub tail_bound: f64,
    pub truncation: usize,
}

impl DiscountedValues {
    /// `(1 - λ)(ν_G - ν_A)`, which tends to the expectation gap limit as `λ -> 1`.
    pub fn abel_gap(&self) -> f64 {
        (1.0 - self.lambda) * (self.nu_greedy - self.nu_alternating)
    }
}

/// `ν_A = λμ / ((1 - λ)² (1 + λ))`.
pub fn discounted_alternating(mu: f64, lambda: f64) -> f64 {
    lambda * mu / ((1.0 - lambda).powi(2) * (1.0 + lambda))
}

/// Discounted values of alternating (closed form) and greedy (series).
///
/// The greedy increment is `(1/2) E|Δ_n| + nμ/2`; the second part is summed
/// in closed form and the first is truncated after `truncation` terms, with
/// tail at most `(γ/2) λ^(N+1) / (1 - λ)`.
pub fn discounted_values(
    pair: &SourcePair,
    tie: TieBreak,
    lambda: f64,
    truncation: usize,
    precision: f64,
) -> Result<DiscountedValues> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!("discount {lambda} outside [0, 1)")));
    }
    let fm = pair.float_moments();
    let tail_bound = fm.gamma / 2.0 * lambda.powi(truncation as i32 + 1) / (1.0 - lambda);
    if tail_bound > precision {
        return Err(Error::TruncationInsufficient {
            tail: tail_bound,
            precision,
        });
    }
    let chain = DeltaChain::build(pair, tie, DEFAULT_STATE_CAP)?;
    let abs = chain.abs_delta_f64(truncation);
    let mut weight = 1.0;
    let mut series = 0.0;
    for a in abs.iter().skip(1) {
        weight *= lambda;
        series += weight * a / 2.0;
    }
    let linear = fm.mu / 2.0 * lambda / (1.0 - lambda).powi(2);
    Ok(DiscountedValues {
        lambda,
        nu_alternating: discounted_alternating(fm.mu, lambda),
        nu_greedy: series + linear,
        tail_bound,
        truncation,
    })
}
