//! Sign behavior of `D_n = M_G(n) - M_A(n)` along coupled paths.

use serde::Serialize;

/// Per-path accumulator fed one epoch at a time.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct SignTracker {
    pub epochs: u64,
    pub positive_seen: bool,
    pub negative_seen: bool,
    /// Changes between strictly positive and strictly negative values,
    /// ignoring zeros in between.
    pub sign_changes: u64,
    pub negative_epochs: u64,
    /// `max |D_n| / n^{5/4}`.
    pub max_scaled: f64,
    last_sign: i8,
}

impl SignTracker {
    pub fn update(&mut self, n: u64, d: i64) {
        self.epochs += 1;
        let sign = d.signum() as i8;
        if sign != 0 {
            if self.last_sign != 0 && sign != self.last_sign {
                self.sign_changes += 1;
            }
            self.last_sign = sign;
        }
        if d > 0 {
            self.positive_seen = true;
        } else if d < 0 {
            self.negative_seen = true;
            self.negative_epochs += 1;
        }
        let scaled = d.unsigned_abs() as f64 / (n as f64).powf(1.25);
        self.max_scaled = self.max_scaled.max(scaled);
    }

    pub fn both_signs(&self) -> bool {
        self.positive_seen && self.negative_seen
    }

    pub fn negative_fraction(&self) -> f64 {
        self.negative_epochs as f64 / self.epochs.max(1) as f64
    }

    pub fn is_identically_zero(&self) -> bool {
        !self.positive_seen && !self.negative_seen
    }
}

/// Aggregate over replications.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignReport {
    pub replications: usize,
    pub both_signs_fraction: f64,
    pub identically_zero_fraction: f64,
    pub mean_sign_changes: f64,
    pub mean_negative_fraction: f64,
    pub max_scaled: f64,
}

pub fn sign_change_stats(paths: &[SignTracker]) -> SignReport {
    let k = paths.len().max(1) as f64;
    let count = |f: fn(&SignTracker) -> bool| paths.iter().filter(|p| f(p)).count() as f64 / k;
    SignReport {
        replications: paths.len(),
        both_signs_fraction: count(SignTracker::both_signs),
        identically_zero_fraction: count(SignTracker::is_identically_zero),
        mean_sign_changes: paths.iter().map(|p| p.sign_changes as f64).sum::<f64>() / k,
        mean_negative_fraction: paths.iter().map(|p| p.negative_fraction()).sum::<f64>() / k,
        max_scaled: paths.iter().map(|p| p.max_scaled).fold(0.0, f64::max),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_changes_across_zeros() {
        let mut t = SignTracker::default();
        for (n, d) in [0, 1, 0, -2, -1, 0, 3, 3].into_iter().enumerate() {
            t.update(n as u64 + 1, d);
        }
        assert_eq!(t.sign_changes, 2);
        assert_eq!(t.negative_epochs, 2);
        assert!(t.both_signs());
        assert_eq!(t.max_scaled, 1.0 / 2f64.powf(1.25));
    }

    #[test]
    fn zero_paths() {
        let mut t = SignTracker::default();
        (1..100).for_each(|n| t.update(n, 0));
        let report = sign_change_stats(&[t, t]);
        assert_eq!(report.identically_zero_fraction, 1.0);
        assert_eq!(report.both_signs_fraction, 0.0);
        assert_eq!(report.mean_sign_changes, 0.0);
    }
}
