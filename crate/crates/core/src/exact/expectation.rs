//! Exact expected match counts.
//!
//! Greedy expectations come from the chain through
//! `E M_G(n) = (1/2) Σ_{k=1}^{n-1} E|Δ_k| + n(n-1)μ/4`, where
//! `E|Δ_k| = Σ_j π_k(j) |x_j|`.

use num_bigint::BigInt;
use num_traits::Zero;

use super::chain::DeltaChain;
use crate::engine::TieBreak;
use crate::error::Result;
use crate::model::SourcePair;
use crate::rational::{int, Rational};

/// `E M_A(n) = ceil(n/2) floor(n/2) μ`.
pub fn alternating_expectation(pair: &SourcePair, n: u64) -> Rational {
    let prod = BigInt::from(n.div_ceil(2)) * BigInt::from(n / 2);
    Rational::from_integer(prod) * &pair.moments().mu
}

/// `E M_A(n + 1) - E M_A(n)`.
pub fn alternating_increment(pair: &SourcePair, n: u64) -> Rational {
    alternating_expectation(pair, n + 1) - alternating_expectation(pair, n)
}

/// Exact greedy expectations for `n = 0..=n_max`.
#[derive(Debug, Clone)]
pub struct ExpectationSeries {
    mu: Rational,
    abs_delta: Vec<Rational>,
    greedy: Vec<Rational>,
}

impl ExpectationSeries {
    pub fn compute(chain: &DeltaChain, mu: &Rational, n_max: usize) -> Self {
        let scale = BigInt::from(chain.scale());
        let q = BigInt::from(chain.denominator());
        let abs_units: Vec<BigInt> = chain
            .state_units()
            .iter()
            .map(|&x| BigInt::from(x.unsigned_abs()))
            .collect();

        // weights are numerators over Q^k; q_pow = Q^k.
        let mut weights = vec![BigInt::zero(); chain.len()];
        weights[0] = BigInt::from(1);
        let mut q_pow = BigInt::from(1);
        // acc / (D Q^k) = Σ_{j=1}^{k} E|Δ_j|
        let mut acc = BigInt::zero();
        let mut abs_delta = Vec::with_capacity(n_max + 1);
        let mut greedy = Vec::with_capacity(n_max + 1);
        abs_delta.push(Rational::zero());
        greedy.push(Rational::zero());
        for k in 1..=n_max {
            // E M_G(k) uses E|Δ_j| for j < k, i.e. acc at step k - 1.
            let sum_prev = Rational::new(acc.clone(), &scale * &q_pow);
            greedy.push(sum_prev / int(2) + quarter_pairs(k as u64) * mu);
            if k == n_max {
                break;
            }
            weights = chain.step_exact(&weights);
            q_pow *= &q;
            let a_k: BigInt = weights.iter().zip(&abs_units).map(|(w, a)| w * a).sum();
            acc = acc * &q + &a_k;
            abs_delta.push(Rational::new(a_k, &scale * &q_pow));
        }
        if n_max > 0 {
            weights = chain.step_exact(&weights);
            q_pow *= &q;
            let a_k: BigInt = weights.iter().zip(&abs_units).map(|(w, a)| w * a).sum();
            abs_delta.push(Rational::new(a_k, &scale * &q_pow));
        }
        Self {
            mu: mu.clone(),
            abs_delta,
            greedy,
        }
    }

    pub fn for_pair(pair: &SourcePair, tie: TieBreak, n_max: usize) -> Result<Self> {
        let chain = DeltaChain::build(pair, tie, super::chain::DEFAULT_STATE_CAP)?;
        Ok(Self::compute(&chain, &pair.moments().mu, n_max))
    }

    pub fn n_max(&self) -> usize {
        self.greedy.len() - 1
    }

    /// `E M_G(n)`.
    pub fn greedy(&self, n: usize) -> &Rational {
        &self.greedy[n]
    }

    /// `E|Δ_k|`.
    pub fn abs_delta(&self, k: usize) -> &Rational {
        &self.abs_delta[k]
    }

    /// `E M_G(n + 1) - E M_G(n) = (1/2) E|Δ_n| + nμ/2`.
    pub fn greedy_increment(&self, n: usize) -> Rational {
        &self.abs_delta[n] / int(2) + Rational::from_integer(BigInt::from(n)) * &self.mu / int(2)
    }

    /// `E M_G(n) - E M_A(n)`.
    pub fn gap(&self, n: usize) -> Rational {
        let alt = Rational::from_integer(BigInt::from((n as u64).div_ceil(2) * (n as u64 / 2)))
            * &self.mu;
        &self.greedy[n] - alt
    }

    /// `E ΔM_G(n) - E ΔM_A(n)`, increments taken forward.
    pub fn increment_gap(&self, n: usize) -> Rational {
        // E ΔM_A(n) is nμ/2 for even n and (n+1)μ/2 for odd n.
        let alt_steps = n as u64 + n as u64 % 2;
        self.greedy_increment(n) - Rational::from_integer(BigInt::from(alt_steps)) * &self.mu / int(2)
    }
}

/// `n(n-1)/4`.
fn quarter_pairs(n: u64) -> Rational {
    Rational::new(BigInt::from(n) * BigInt::from(n.saturating_sub(1)), BigInt::from(4))
}

/// Exact `E M_G(n)` through the chain.
pub fn greedy_expectation(pair: &SourcePair, n: usize, tie: TieBreak) -> Result<Rational> {
    Ok(ExpectationSeries::for_pair(pair, tie, n)?.greedy(n).clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn alternating_values() {
        let pair = SourcePair::illustrative();
        assert_eq!(alternating_expectation(&pair, 4), int(2));
        assert_eq!(alternating_expectation(&pair, 3), int(1));
        assert_eq!(alternating_expectation(&pair, 1), int(0));
        assert_eq!(alternating_expectation(&pair, 0), int(0));
    }

    #[test]
    fn illustrative_small_horizons() {
        let pair = SourcePair::illustrative();
        let series = ExpectationSeries::for_pair(&pair, TieBreak::PreferR, 3).unwrap();
        assert_eq!(*series.greedy(1), int(0));
        assert_eq!(*series.greedy(2), ratio(1, 2));
        assert_eq!(*series.greedy(3), ratio(5, 4));
        // Δ_1 is 1 with probability 1/2.
        assert_eq!(*series.abs_delta(1), ratio(1, 2));
    }

    #[test]
    fn increments_telescope() {
        let pair = SourcePair::parse(&["1/2", "1/3", "1/6"], &["1/6", "1/6", "2/3"]).unwrap();
        let series = ExpectationSeries::for_pair(&pair, TieBreak::PreferR, 60).unwrap();
        for n in 0..60 {
            assert_eq!(
                series.greedy(n + 1) - series.greedy(n),
                series.greedy_increment(n),
                "n = {n}"
            );
            assert_eq!(
                series.increment_gap(n),
                series.gap(n + 1) - series.gap(n),
                "n = {n}"
            );
        }
    }

    #[test]
    fn series_lengths_match_request() {
        let pair = SourcePair::illustrative();
        for n_max in 0..4 {
            let s = ExpectationSeries::for_pair(&pair, TieBreak::PreferR, n_max).unwrap();
            assert_eq!(s.n_max(), n_max);
            assert_eq!(s.abs_delta.len(), n_max + 1);
        }
    }
}
