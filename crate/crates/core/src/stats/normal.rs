//! Normal and folded-normal distribution functions.
//!
//! `Φ(x) = erfc(-x/√2) / 2` with the complementary error function of
//! `libm` (the musl implementation, within a few ulp over the real line).
//! Quantiles start from the `statrs` inverse and take Newton steps against
//! that `erfc`.

use libm::erfc;
use std::f64::consts::{PI, SQRT_2};

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// CDF of `N(0, variance)`.
pub fn centered_normal_cdf(x: f64, variance: f64) -> f64 {
    normal_cdf(x / variance.sqrt())
}

/// `x` with `erfc(x) = y` for `0 < y < 2`.
fn erfc_inverse(y: f64) -> f64 {
    let mut x = statrs::function::erf::erfc_inv(y);
    for _ in 0..3 {
        let slope = -2.0 / PI.sqrt() * (-x * x).exp();
        if slope == 0.0 || !x.is_finite() {
            break;
        }
        x -= (erfc(x) - y) / slope;
    }
    x
}

/// Standard normal quantile.
pub fn normal_quantile(p: f64) -> f64 {
    -SQRT_2 * erfc_inverse(2.0 * p)
}

/// CDF of `|N(0, variance)|`: 0 below zero, `2Φ(x/σ) - 1` above.
pub fn folded_normal_cdf(x: f64, variance: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        // 2Φ(z) - 1 = erf(z/√2) = 1 - erfc(z/√2)
        1.0 - erfc(x / (variance.sqrt() * SQRT_2))
    }
}

/// Quantile of `|N(0, variance)|`.
pub fn folded_normal_quantile(p: f64, variance: f64) -> f64 {
    variance.sqrt() * SQRT_2 * erfc_inverse(1.0 - p)
}

/// Mean of `|N(0, variance)|`, `√(2 variance / π)`.
pub fn folded_normal_mean(variance: f64) -> f64 {
    (2.0 * variance / PI).sqrt()
}
