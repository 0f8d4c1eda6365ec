//! Scale mixture of centered normals whose variance is folded normal.
//!
//! With `σ² ~ |N(0, v)|` and `X | σ² ~ N(0, σ²)`, substituting the
//! standard deviation `u = σ` gives
//! `P(X > x) = ∫_0^∞ Φ(-x/u) ρ(u) du` with `ρ(u) = 2u g(u²)` and `g` the
//! folded-normal density. The integrand vanishes smoothly as `u -> 0`, so
//! the limiting step function at `u = 0` never has to be evaluated.

use std::f64::consts::PI;

use libm::erfc;

use super::normal::{folded_normal_mean, normal_cdf};
use super::quadrature::integrate;
use crate::error::Result;
use crate::model::FloatMoments;

/// Target absolute accuracy of [`MixtureCdf::cdf`].
pub const MIXTURE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureCdf {
    /// Variance parameter `v` of the folded normal mixing law.
    v: f64,
    /// Upper end of the `u` range.
    u_max: f64,
    /// Mixing mass beyond `u_max`.
    truncated_mass: f64,
}

impl MixtureCdf {
    pub fn new(v: f64) -> Self {
        assert!(v > 0.0, "mixing variance must be positive");
        let t_max = 8.5 * v.sqrt();
        Self {
            v,
            u_max: t_max.sqrt(),
            truncated_mass: erfc(t_max / (2.0 * v).sqrt()),
        }
    }

    /// Limit law of `(M_G(n) - M_A(n)) / n^{5/4}`:
    /// `v = (σ_R² + σ_S²)³ / (128 μ²)`.
    pub fn for_moments(m: &FloatMoments) -> Self {
        Self::new(m.variance_sum().powi(3) / (128.0 * m.mu * m.mu))
    }

    pub fn mixing_variance(&self) -> f64 {
        self.v
    }

    pub fn truncated_mass(&self) -> f64 {
        self.truncated_mass
    }

    /// Variance of the mixture, `E σ² = √(2v/π)`.
    pub fn variance(&self) -> f64 {
        folded_normal_mean(self.v)
    }

    fn density_u(&self, u: f64) -> f64 {
        let t = u * u;
        2.0 * u * (2.0 / (PI * self.v)).sqrt() * (-t * t / (2.0 * self.v)).exp()
    }

    /// `P(X > x)` for `x >= 0`.
    pub fn upper_tail(&self, x: f64) -> Result<f64> {
        let x = x.abs();
        if x == 0.0 {
            return Ok(0.5);
        }
        let tail = integrate(
            |u| {
                if u <= 0.0 {
                    0.0
                } else {
                    normal_cdf(-x / u) * self.density_u(u)
                }
            },
            0.0,
            self.u_max,
            MIXTURE_TOLERANCE / 10.0,
        )?;
        // the truncated mixing mass contributes at most its own size
        Ok(tail + 0.5 * self.truncated_mass)
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        if x == 0.0 {
            return Ok(0.5);
        }
        let tail = self.upper_tail(x)?;
        Ok(if x > 0.0 { 1.0 - tail } else { tail })
    }

    /// Mixture density at `x`.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        integrate(
            |u| {
                if u <= 0.0 {
                    0.0
                } else {
                    let z = x / u;
                    (-0.5 * z * z).exp() / ((2.0 * PI).sqrt() * u) * self.density_u(u)
                }
            },
            0.0,
            self.u_max,
            MIXTURE_TOLERANCE / 10.0,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn illustrative() -> MixtureCdf {
        // σ_R² + σ_S² = 1/4, μ = 1/2
        MixtureCdf::new((0.25f64).powi(3) / 32.0)
    }

    #[test]
    fn symmetric_about_zero() {
        let f = illustrative();
        assert_eq!(f.cdf(0.0).unwrap(), 0.5);
        for &x in &[0.01, 0.05, 0.1, 0.3, 0.7] {
            let (lo, hi) = (f.cdf(-x).unwrap(), f.cdf(x).unwrap());
            assert!((lo + hi - 1.0).abs() < 1e-12);
            assert!(hi > 0.5);
        }
    }

    #[test]
    fn monotone_with_proper_limits() {
        let f = illustrative();
        let grid: Vec<f64> = (-60..=60).map(|i| i as f64 * 0.02).collect();
        let values: Vec<f64> = grid.iter().map(|&x| f.cdf(x).unwrap()).collect();
        assert!(values.windows(2).all(|w| w[0] <= w[1] + 1e-12));
        assert!(f.cdf(-1e6 * f.variance().sqrt()).unwrap() < 1e-6);
        assert!(f.cdf(1e6 * f.variance().sqrt()).unwrap() > 1.0 - 1e-6);
    }

    #[test]
    fn pdf_integrates_to_cdf() {
        let f = illustrative();
        let x = 0.12;
        let mass = integrate(|y| f.pdf(y).unwrap(), 0.0, x, 1e-10).unwrap();
        assert!((0.5 + mass - f.cdf(x).unwrap()).abs() < 1e-7);
    }
}
