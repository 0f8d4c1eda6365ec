//! Standardized match counts and their limiting variances.

use serde::{Deserialize, Serialize};

use crate::model::FloatMoments;

/// How the selection ratio `α` is realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// `R(n)/n -> α` fast enough (alternating, greedy at `α = 1/2`, restorative).
    Controlled,
    /// Independent `α`-coins.
    Bernoulli,
}

/// `√n [M(n) / (α(1-α) n²) - μ]`.
pub fn standardize_matches(matches: u64, n: u64, mu: f64, alpha: f64) -> f64 {
    let nf = n as f64;
    nf.sqrt() * (matches as f64 / (alpha * (1.0 - alpha) * nf * nf) - mu)
}

/// Limiting variance of [`standardize_matches`].
///
/// Controlled: `[(1-α)σ_R² + ασ_S²] / (α(1-α))`. Bernoulli sampling adds
/// `μ²(1-2α)² / (α(1-α))`.
pub fn clt_variance_target(m: &FloatMoments, alpha: f64, sampling: Sampling) -> f64 {
    let q = alpha * (1.0 - alpha);
    let controlled = ((1.0 - alpha) * m.sigma_r2 + alpha * m.sigma_s2) / q;
    match sampling {
        Sampling::Controlled => controlled,
        Sampling::Bernoulli => controlled + m.mu * m.mu * (1.0 - 2.0 * alpha).powi(2) / q,
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance; needs at least two values.
pub fn sample_variance(xs: &[f64]) -> f64 {
    assert!(xs.len() >= 2, "variance needs two values");
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Pearson correlation.
pub fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx).powi(2);
        syy += (y - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}

/// Median (mean of the two central values for even length).
pub fn median(xs: &[f64]) -> f64 {
    assert!(!xs.is_empty(), "median of empty sample");
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len() / 2;
    if v.len() % 2 == 1 {
        v[k]
    } else {
        0.5 * (v[k - 1] + v[k])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SourcePair;

    #[test]
    fn centering_is_exact() {
        for n in [20u64, 100, 1000] {
            let z = standardize_matches((0.25 * 0.5 * (n * n) as f64) as u64, n, 0.5, 0.5);
            assert!(z.abs() < 1e-12);
        }
        // α(1-α) = 0.21, μ = 1/3, n = 300: M = 6300
        assert!(standardize_matches(6300, 300, 1.0 / 3.0, 0.3).abs() < 1e-12);
    }

    #[test]
    fn illustrative_targets() {
        let m = *SourcePair::illustrative().float_moments();
        let c = clt_variance_target(&m, 0.5, Sampling::Controlled);
        assert!((c - 0.5).abs() < 1e-15);
        assert_eq!(c, clt_variance_target(&m, 0.5, Sampling::Bernoulli));
        let gap = clt_variance_target(&m, 0.3, Sampling::Bernoulli)
            - clt_variance_target(&m, 0.3, Sampling::Controlled);
        assert!((gap - 0.25 * 0.16 / 0.21).abs() < 1e-14);
    }

    #[test]
    fn summary_statistics() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&xs), 2.5);
        assert!((sample_variance(&xs) - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(median(&xs), 2.5);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert!((correlation(&xs, &[2.0, 4.0, 6.0, 8.0]) - 1.0).abs() < 1e-15);
    }
}
