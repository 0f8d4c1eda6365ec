//! Kolmogorov-Smirnov distance against a continuous reference.

/// `sup_x |F_n(x) - F(x)|` for the empirical CDF of `sample`.
pub fn ks_distance<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> f64 {
    assert!(!sample.is_empty(), "empty sample");
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let i = i as f64;
            ((i + 1.0) / n - f).max(f - i / n)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic critical value `√(-ln(α/2)/2) / √n` of the one-sample statistic.
pub fn ks_critical_value(n: usize, alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::normal::{normal_cdf, normal_quantile};

    #[test]
    fn exact_quantiles_give_half_step() {
        let n = 500;
        let sample: Vec<f64> = (1..=n)
            .map(|i| normal_quantile((i as f64 - 0.5) / n as f64))
            .collect();
        let d = ks_distance(&sample, normal_cdf);
        assert!((d - 0.5 / n as f64).abs() < 1e-12);
    }

    #[test]
    fn constant_sample_is_far() {
        assert!(ks_distance(&[0.3; 50], normal_cdf) >= 0.5);
    }

    #[test]
    fn critical_value_at_one_percent() {
        assert!((ks_critical_value(10_000, 0.01) - 0.016_276).abs() < 1e-5);
    }
}
