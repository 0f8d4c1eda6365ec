mod common;

use common::{enumerate_expectation, random_pair, OraclePolicy};
use joinpolicy::engine::TieBreak;
use joinpolicy::exact::*;
use joinpolicy::rational::{int, ratio, to_f64, Rational};
use joinpolicy::SourcePair;
use num_traits::{Signed, Zero};

#[test]
fn chain_expectation_matches_exhaustive_enumeration() {
    let mut pairs = vec![SourcePair::illustrative()];
    pairs.extend((0..8).map(|i| random_pair(1000 + i, 3, 6)));
    for pair in &pairs {
        for (tie, oracle) in [
            (TieBreak::PreferR, OraclePolicy::GreedyPreferR),
            (TieBreak::PreferS, OraclePolicy::GreedyPreferS),
        ] {
            let series = ExpectationSeries::for_pair(pair, tie, 10).unwrap();
            for n in 0..=10 {
                assert_eq!(
                    *series.greedy(n),
                    enumerate_expectation(pair, n, oracle),
                    "pair {:?} n {n} tie {tie:?}",
                    pair.definition()
                );
            }
        }
    }
}

#[test]
fn enumeration_at_twelve_epochs() {
    let pair = random_pair(77, 3, 4);
    let series = ExpectationSeries::for_pair(&pair, TieBreak::PreferR, 12).unwrap();
    assert_eq!(
        *series.greedy(12),
        enumerate_expectation(&pair, 12, OraclePolicy::GreedyPreferR)
    );
}

#[test]
fn alternating_formula_matches_enumeration() {
    for seed in 0..5 {
        let pair = random_pair(seed, 3, 6);
        for n in 0..=9 {
            assert_eq!(
                alternating_expectation(&pair, n as u64),
                enumerate_expectation(&pair, n, OraclePolicy::Alternating)
            );
        }
    }
}

#[test]
fn illustrative_closed_form_over_two_hundred_epochs() {
    let series =
        ExpectationSeries::for_pair(&SourcePair::illustrative(), TieBreak::PreferR, 200).unwrap();
    for n in 1..=200 {
        let exact = to_f64(series.greedy(n));
        let closed = eval_closed_form_example(n as u64);
        assert!((exact - closed).abs() < 1e-9, "n = {n}: {exact} vs {closed}");
    }
}

#[test]
fn dynamic_program_equals_greedy_and_dominates_fixed_sequences() {
    for seed in 0..6 {
        let pair = random_pair(500 + seed, 4, 6);
        let series = ExpectationSeries::for_pair(&pair, TieBreak::PreferR, 7).unwrap();
        for h in 1..=7 {
            let v = dp_optimal_value(&pair, h).unwrap();
            assert_eq!(v, *series.greedy(h), "seed {seed} horizon {h}");
            let best = enumerate_nonadaptive_values(&pair, h)
                .unwrap()
                .into_iter()
                .map(|(_, x)| x)
                .max()
                .unwrap();
            assert!(best <= v);
            assert_eq!(best, alternating_expectation(&pair, h as u64));
        }
    }
}

#[test]
fn greedy_never_below_alternating() {
    for seed in 0..10 {
        let pair = random_pair(seed, 4, 8);
        let series = ExpectationSeries::for_pair(&pair, TieBreak::PreferR, 300).unwrap();
        for n in 0..=300 {
            assert!(series.gap(n) >= Rational::zero(), "seed {seed} n {n}");
        }
    }
}

#[test]
fn expectation_is_tie_independent() {
    // the chain changes with the tie rule, E M_G does not
    for seed in 0..6 {
        let pair = random_pair(40 + seed, 4, 8);
        let a = ExpectationSeries::for_pair(&pair, TieBreak::PreferR, 60).unwrap();
        let b = ExpectationSeries::for_pair(&pair, TieBreak::PreferS, 60).unwrap();
        let c = ExpectationSeries::for_pair(&pair, TieBreak::Random { p: 0.375 }, 60).unwrap();
        for n in 0..=60 {
            assert_eq!(a.greedy(n), b.greedy(n));
            assert_eq!(a.greedy(n), c.greedy(n));
        }
    }
}

#[test]
fn stationary_mean_absolute_delta_matches_gap_limit() {
    // (1/2) E_π|Δ| = (σ_R² + σ_S²)/(8μ) + μ/4
    for seed in 0..25 {
        let pair = random_pair(200 + seed, 4, 10);
        let chain = DeltaChain::build(&pair, TieBreak::PreferR, DEFAULT_STATE_CAP).unwrap();
        let Ok(pi) = chain.stationary() else { continue };
        let total: Rational = pi.iter().cloned().fold(Rational::zero(), |a, b| a + b);
        assert_eq!(total, int(1));
        let mean_abs = pi
            .iter()
            .zip(chain.states())
            .fold(Rational::zero(), |acc, (p, x)| acc + p * x.abs());
        let mu = &pair.moments().mu;
        assert_eq!(
            mean_abs / int(2),
            expectation_gap_limit(&pair) + mu / int(4),
            "pair {:?}",
            pair.definition()
        );
    }
}

#[test]
fn second_order_expansion_settles() {
    // E M_G(n) - n²μ/4 - n L converges for aperiodic chains
    let mut checked = 0;
    for seed in 0..12 {
        let pair = random_pair(300 + seed, 3, 6);
        let chain = DeltaChain::build(&pair, TieBreak::PreferR, DEFAULT_STATE_CAP).unwrap();
        if pair.is_degenerate() || !chain.structure().is_ergodic() {
            continue;
        }
        checked += 1;
        let mu = &pair.moments().mu;
        let l = expectation_gap_limit(&pair);
        let series = ExpectationSeries::compute(&chain, mu, 800);
        let c = |n: usize| {
            let nn = int(n as i64);
            to_f64(&(series.greedy(n) - &nn * &nn * mu / int(4) - &nn * &l))
        };
        let early = (c(400) - c(200)).abs();
        let late = (c(800) - c(400)).abs();
        assert!(late <= early, "seed {seed}");
        assert!(late < 1e-6, "seed {seed}");
        assert!((c(800) - c(799)).abs() < 1e-8, "seed {seed}");
    }
    assert!(checked >= 3);
}

#[test]
fn illustrative_second_order_constant() {
    let pair = SourcePair::illustrative();
    let series = ExpectationSeries::for_pair(&pair, TieBreak::PreferR, 400).unwrap();
    let n = 400i64;
    let c = series.greedy(400) - ratio(n * n, 8) - ratio(n, 16);
    assert!((to_f64(&c) + 7.0 / 64.0).abs() < 1e-12);
}

#[test]
fn catch_up_lag_bounds() {
    for seed in 0..200 {
        let pair = random_pair(seed, 4, 12);
        assert!(catch_up_lag(&pair) <= catch_up_lag_bound(&pair));
        let mu = &pair.moments().mu;
        let consistency = (int(1) - mu) / (int(2) * mu) * mu / int(4);
        assert!(expectation_gap_limit(&pair) <= consistency);
    }
}

#[test]
fn row_stochastic_chains_within_gamma() {
    for seed in 0..20 {
        let pair = random_pair(seed * 7 + 1, 4, 12);
        for tie in [TieBreak::PreferR, TieBreak::PreferS, TieBreak::Random { p: 0.5 }] {
            let chain = DeltaChain::build(&pair, tie, DEFAULT_STATE_CAP).unwrap();
            assert!(is_row_stochastic(&chain));
            assert!(max_abs_state(&chain) <= pair.moments().gamma);
        }
    }
}

#[test]
fn chain_dump_serializes() {
    let chain =
        DeltaChain::build(&SourcePair::illustrative(), TieBreak::PreferR, DEFAULT_STATE_CAP).unwrap();
    let json = serde_json::to_value(chain.dump()).unwrap();
    assert_eq!(json["initial"], "0");
    assert_eq!(json["tie"]["kind"], "prefer_r");
    assert_eq!(json["edges"].as_array().unwrap().len(), 4);
}

#[test]
fn discounted_greedy_matches_direct_series() {
    let pair = random_pair(9, 3, 6);
    let lambda: f64 = 0.5;
    let v = discounted_values(&pair, TieBreak::PreferR, lambda, 120, 1e-12).unwrap();
    let series = ExpectationSeries::for_pair(&pair, TieBreak::PreferR, 121).unwrap();
    let direct: f64 = (1..=120)
        .map(|n| lambda.powi(n as i32) * to_f64(&series.greedy_increment(n)))
        .sum();
    assert!((v.nu_greedy - direct).abs() < 1e-12);
    let direct_alt: f64 = (1..=120)
        .map(|n| lambda.powi(n) * to_f64(&alternating_increment(&pair, n as u64)))
        .sum();
    assert!((v.nu_alternating - direct_alt).abs() < 1e-12);
}
