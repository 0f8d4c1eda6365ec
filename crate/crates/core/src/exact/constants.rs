//! Asymptotic constants of the greedy versus alternating comparison.

use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::chain::{DeltaChain, DEFAULT_STATE_CAP};
use super::expectation::ExpectationSeries;
use crate::engine::TieBreak;
use crate::error::{Error, Result};
use crate::model::SourcePair;
use crate::rational::{ceil_to_int, int, to_f64, Rational};

/// `lim (E M_G(n) - E M_A(n)) / n = (σ_R² + σ_S²) / (8μ)`.
pub fn expectation_gap_limit(pair: &SourcePair) -> Rational {
    let m = pair.moments();
    m.variance_sum() / (int(8) * &m.mu)
}

/// Smallest `k` with `E M_G(n) <= E M_A(n + k)` for large `n`:
/// `ceil((σ_R² + σ_S²) / (4μ²))`, which is 0 for a degenerate pair.
pub fn catch_up_lag(pair: &SourcePair) -> u64 {
    let m = pair.moments();
    let x = m.variance_sum() / (int(4) * &m.mu * &m.mu);
    ceil_to_int(&x).to_u64().expect("lag fits in u64")
}

/// `ceil((1 - μ) / (2μ))`, an upper bound for [`catch_up_lag`].
pub fn catch_up_lag_bound(pair: &SourcePair) -> u64 {
    let mu = &pair.moments().mu;
    let x = (int(1) - mu) / (int(2) * mu);
    ceil_to_int(&x).to_u64().expect("bound fits in u64")
}

/// Limits of `E ΔM_G(n) - E ΔM_A(n)` along odd and even `n`, with the
/// values the chain produces at a finite horizon.
#[derive(Debug, Clone, Serialize)]
pub struct ParityLimits {
    /// `(σ_R² + σ_S²)/(8μ) - μ/4`.
    #[serde(with = "crate::rational::serde_string")]
    pub odd: Rational,
    /// `(σ_R² + σ_S²)/(8μ) + μ/4`.
    #[serde(with = "crate::rational::serde_string")]
    pub even: Rational,
    /// `(1/2) E_π|Δ|` under the stationary law, which should equal `even`.
    #[serde(with = "crate::rational::serde_string")]
    pub stationary_even: Rational,
    pub horizon: u64,
    pub odd_at_horizon: f64,
    pub even_at_horizon: f64,
    /// Estimated per-step contraction of the distance to the limits.
    pub geometric_rate: f64,
}

/// Checks ergodicity and evaluates the parity limits.
///
/// `horizon` must be at least 8. The chain values at `horizon - 1` and
/// `horizon` are reported alongside the limits.
pub fn parity_limits(pair: &SourcePair, tie: TieBreak, horizon: u64) -> Result<ParityLimits> {
    if horizon < 8 {
        return Err(Error::InvalidParameter("parity horizon must be at least 8".into()));
    }
    if pair.is_degenerate() {
        return Err(Error::NotErgodic(
            "variance sum is zero, the gap vanishes identically".into(),
        ));
    }
    let chain = DeltaChain::build(pair, tie, DEFAULT_STATE_CAP)?;
    let structure = chain.structure();
    if !structure.is_ergodic() {
        return Err(Error::NotErgodic(format!(
            "{} closed classes, period {}",
            structure.recurrent_classes.len(),
            structure.period
        )));
    }
    let mu = &pair.moments().mu;
    let limit = expectation_gap_limit(pair);
    let quarter_mu = mu / int(4);
    let odd = &limit - &quarter_mu;
    let even = &limit + &quarter_mu;

    let pi = chain.stationary()?;
    let stationary_abs: Rational = pi
        .iter()
        .zip(chain.states())
        .map(|(p, x)| p * num_traits::Signed::abs(&x))
        .fold(Rational::zero(), |a, b| a + b);
    let stationary_even = stationary_abs / int(2);

    let n = horizon as usize;
    let series = ExpectationSeries::compute(&chain, mu, n + 1);
    let target = |k: usize| if k % 2 == 1 { &odd } else { &even };
    let deviation = |k: usize| to_f64(&num_traits::Signed::abs(&(series.increment_gap(k) - target(k))));
    let (odd_n, even_n) = if n % 2 == 1 { (n, n - 1) } else { (n - 1, n) };

    let m = (n / 4).min(100);
    let window = |k: usize| deviation(k).max(deviation(k + 1));
    let (early, late) = (window(m), window(2 * m));
    let geometric_rate = if early == 0.0 {
        0.0
    } else {
        (late / early).powf(1.0 / m as f64)
    };

    Ok(ParityLimits {
        odd_at_horizon: to_f64(&series.increment_gap(odd_n)),
        even_at_horizon: to_f64(&series.increment_gap(even_n)),
        odd,
        even,
        stationary_even,
        horizon,
        geometric_rate,
    })
}
