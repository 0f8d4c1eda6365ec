//! Certification of the exponential tail bound for the greedy selection count.
//!
//! For `t >= 1` and `n >= (2 + γ/μ)²`,
//! `P(|(R_G(n) - n/2)/√n| > t) <= 2 exp(-(μ/2γ)² t)`. Each `t` passes when
//! a one-sided Clopper-Pearson upper confidence bound on the exceedance
//! probability stays below the bound.

use serde::Serialize;
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};
use crate::model::FloatMoments;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HoeffdingRow {
    pub t: f64,
    pub exceedances: usize,
    pub replications: usize,
    pub frequency: f64,
    pub upper_confidence: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Smallest `n` for which the bound is claimed.
pub fn hoeffding_min_n(m: &FloatMoments) -> f64 {
    (2.0 + m.gamma / m.mu).powi(2)
}

/// `2 exp(-(μ/2γ)² t)`.
pub fn hoeffding_bound(m: &FloatMoments, t: f64) -> f64 {
    2.0 * (-(m.mu / (2.0 * m.gamma)).powi(2) * t).exp()
}

/// One-sided upper confidence bound for a binomial proportion with `k`
/// successes in `n` trials at confidence `1 - alpha`.
pub fn clopper_pearson_upper(k: usize, n: usize, alpha: f64) -> f64 {
    assert!(n > 0 && k <= n);
    if k == n {
        return 1.0;
    }
    // P(Bin(n, p) <= k) = 1 - I_p(k + 1, n - k); solve for = alpha.
    let (a, b) = ((k + 1) as f64, (n - k) as f64);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if 1.0 - beta_reg(a, b, mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    hi
}

/// Checks the bound at every `t` in `t_grid` from samples of `R_G(n)`.
pub fn hoeffding_certify(
    r_counts: &[u64],
    n: u64,
    m: &FloatMoments,
    t_grid: &[f64],
    alpha: f64,
) -> Result<Vec<HoeffdingRow>> {
    if (n as f64) < hoeffding_min_n(m) {
        return Err(Error::PreconditionViolated(format!(
            "n = {n} below (2 + γ/μ)² = {}",
            hoeffding_min_n(m)
        )));
    }
    if let Some(t) = t_grid.iter().find(|&&t| t < 1.0) {
        return Err(Error::PreconditionViolated(format!("t = {t} below 1")));
    }
    if r_counts.is_empty() {
        return Err(Error::PreconditionViolated("no samples".into()));
    }
    let root_n = (n as f64).sqrt();
    let half = n as f64 / 2.0;
    Ok(t_grid
        .iter()
        .map(|&t| {
            let k = r_counts
                .iter()
                .filter(|&&r| ((r as f64 - half) / root_n).abs() > t)
                .count();
            let upper = clopper_pearson_upper(k, r_counts.len(), alpha);
            let bound = hoeffding_bound(m, t);
            HoeffdingRow {
                t,
                exceedances: k,
                replications: r_counts.len(),
                frequency: k as f64 / r_counts.len() as f64,
                upper_confidence: upper,
                bound,
                pass: upper <= bound,
            }
        })
        .collect())
}
