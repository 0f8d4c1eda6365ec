//! Reference limit laws for goodness-of-fit checks.

use super::mixture::MixtureCdf;
use super::normal::{centered_normal_cdf, folded_normal_cdf};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferenceCdf {
    Normal { variance: f64 },
    FoldedNormal { variance: f64 },
    Mixture(MixtureCdf),
}

impl ReferenceCdf {
    pub fn cdf(&self, x: f64) -> Result<f64> {
        Ok(match self {
            ReferenceCdf::Normal { variance } => centered_normal_cdf(x, *variance),
            ReferenceCdf::FoldedNormal { variance } => folded_normal_cdf(x, *variance),
            ReferenceCdf::Mixture(m) => m.cdf(x)?,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ReferenceCdf::Normal { .. } => "normal",
            ReferenceCdf::FoldedNormal { .. } => "folded-normal",
            ReferenceCdf::Mixture(_) => "normal-scale-mixture",
        }
    }

    /// KS distance of `sample` to this law.
    pub fn ks(&self, sample: &[f64]) -> Result<f64> {
        // Evaluate once per sorted point; mixture evaluations can fail.
        let mut sorted = sample.to_vec();
        sorted.sort_by(f64::total_cmp);
        let values = sorted
            .iter()
            .map(|&x| self.cdf(x))
            .collect::<Result<Vec<_>>>()?;
        let n = sorted.len() as f64;
        Ok(values
            .iter()
            .enumerate()
            .map(|(i, &f)| ((i as f64 + 1.0) / n - f).max(f - i as f64 / n))
            .fold(0.0, f64::max))
    }

    /// `(x, F(x))` rows on an even grid, for plotting.
    pub fn table(&self, lo: f64, hi: f64, points: usize) -> Result<Vec<(f64, f64)>> {
        let step = (hi - lo) / (points.max(2) - 1) as f64;
        (0..points.max(2))
            .map(|i| {
                let x = lo + step * i as f64;
                Ok((x, self.cdf(x)?))
            })
            .collect()
    }
}
