//! Finite-horizon dynamic programming over `ξ = (Γ_R, Γ_S)`.
//!
//! Reading R earns `ξ₂` in expectation and adds `s_i` to `ξ₁` with
//! probability `r_i`; reading S earns `ξ₁` and adds `r_i` to `ξ₂` with
//! probability `s_i`. The optimal value over all policies is computed by
//! backward induction on the forward-reachable states, layered by epoch.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::model::{Source, SourcePair};
use crate::rational::Rational;

/// Largest horizon accepted by the exhaustive routines here.
pub const MAX_HORIZON: usize = 16;

/// Default cap on the states of one layer.
pub const DEFAULT_LAYER_CAP: usize = 2_000_000;

type Xi = (u64, u64);

/// Optimal expected matches over `horizon` epochs from `(0, 0)`.
pub fn dp_optimal_value(pair: &SourcePair, horizon: usize) -> Result<Rational> {
    dp_optimal_value_capped(pair, horizon, DEFAULT_LAYER_CAP)
}

pub fn dp_optimal_value_capped(pair: &SourcePair, horizon: usize, layer_cap: usize) -> Result<Rational> {
    if horizon > MAX_HORIZON {
        return Err(Error::HorizonTooLarge {
            horizon,
            max: MAX_HORIZON,
        });
    }
    if horizon == 0 {
        return Ok(Rational::zero());
    }
    let (r_units, s_units) = (pair.r_units(), pair.s_units());
    let r_moves: Vec<(u64, u64)> = r_units
        .iter()
        .zip(s_units)
        .filter(|(&p, _)| p > 0)
        .map(|(&p, &g)| (p, g))
        .collect();
    let s_moves: Vec<(u64, u64)> = s_units
        .iter()
        .zip(r_units)
        .filter(|(&p, _)| p > 0)
        .map(|(&p, &g)| (p, g))
        .collect();

    // Layer d holds the states at epoch d; decisions are made at d < horizon.
    let mut layers: Vec<Vec<Xi>> = vec![vec![(0, 0)]];
    for _ in 1..horizon {
        let mut seen: HashMap<Xi, ()> = HashMap::new();
        let mut next = Vec::new();
        for &(a, b) in layers.last().expect("nonempty") {
            let succ = r_moves
                .iter()
                .map(|&(_, g)| (a + g, b))
                .chain(s_moves.iter().map(|&(_, g)| (a, b + g)));
            for xi in succ {
                if seen.insert(xi, ()).is_none() {
                    next.push(xi);
                    if next.len() > layer_cap {
                        return Err(Error::StateExplosion { cap: layer_cap });
                    }
                }
            }
        }
        layers.push(next);
    }

    // W_k(ξ) = D^k V_k(ξ) with k epochs left, all in units of 1/D:
    // W_k = max(ξ₂ D^(k-1) + Σ r_i W_{k-1}(ξ₁ + s_i, ξ₂), ξ₁ D^(k-1) + Σ s_i W_{k-1}(ξ₁, ξ₂ + r_i)).
    let d = BigInt::from(pair.scale());
    let mut d_pow = BigInt::from(1); // D^(k-1)
    let mut next_values: HashMap<Xi, BigInt> = HashMap::new();
    for (k, layer) in (1..=horizon).zip(layers.iter().rev()) {
        let mut values = HashMap::with_capacity(layer.len());
        for &(a, b) in layer {
            let future = |moves: &[(u64, u64)], to: &dyn Fn(u64) -> Xi| -> BigInt {
                if k == 1 {
                    return BigInt::zero();
                }
                moves
                    .iter()
                    .map(|&(p, g)| BigInt::from(p) * &next_values[&to(g)])
                    .sum()
            };
            let read_r = BigInt::from(b) * &d_pow + future(&r_moves, &|g| (a + g, b));
            let read_s = BigInt::from(a) * &d_pow + future(&s_moves, &|g| (a, b + g));
            values.insert((a, b), read_r.max(read_s));
        }
        next_values = values;
        if k < horizon {
            d_pow *= &d;
        }
    }
    // reward units are 1/D and each of the horizon - 1 expectations adds a factor D
    let w = next_values.remove(&(0, 0)).expect("root state");
    Ok(Rational::new(w, d_pow * &d))
}

/// Expected matches of every fixed read sequence of length `horizon`.
///
/// A sequence reading `R` records from R and `S` from S has value `R S μ`.
pub fn enumerate_nonadaptive_values(
    pair: &SourcePair,
    horizon: usize,
) -> Result<Vec<(Vec<Source>, Rational)>> {
    if horizon > MAX_HORIZON {
        return Err(Error::HorizonTooLarge {
            horizon,
            max: MAX_HORIZON,
        });
    }
    let mu = &pair.moments().mu;
    Ok((0u32..1 << horizon)
        .map(|bits| {
            let seq: Vec<Source> = (0..horizon)
                .map(|i| if bits >> i & 1 == 1 { Source::R } else { Source::S })
                .collect();
            let r = bits.count_ones() as i64;
            let s = horizon as i64 - r;
            (seq, Rational::from_integer(BigInt::from(r * s)) * mu)
        })
        .collect())
}
