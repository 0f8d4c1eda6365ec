mod common;

use common::props::{self, *};
use common::random_pair;
use joinpolicy::engine::*;
use joinpolicy::model::{derive_moments, LabelDistribution};
use joinpolicy::rational::Rational;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn greedy_keeps_delta_within_gamma(seed in any::<u64>(), run in any::<u64>(), n in 1u64..400, tie in tie_strategy()) {
        delta_within_gamma(seed, run, n, tie)?;
    }

    #[test]
    fn selection_sandwich(seed in any::<u64>(), run in any::<u64>(), n in 1u64..300, tie in tie_strategy()) {
        props::selection_sandwich(seed, run, n, tie)?;
    }

    #[test]
    fn incremental_matches_equal_recount(seed in any::<u64>(), run in any::<u64>(), n in 1u64..400, pick in 0usize..4) {
        recount_agrees(seed, run, n, POLICIES[pick])?;
    }

    #[test]
    fn alternating_splits_every_even_epoch(seed in any::<u64>(), run in any::<u64>(), n in 1u64..400) {
        alternating_split(seed, run, n)?;
    }

    #[test]
    fn coupled_replay_is_deterministic(seed in any::<u64>(), run in any::<u64>(), n in 2u64..300, tie in tie_strategy()) {
        replay_identical(seed, run, n, tie)?;
    }

    #[test]
    fn chain_rows_are_stochastic(seed in any::<u64>(), pick in 0usize..3) {
        chain_row_stochastic(seed, CHAIN_TIES[pick])?;
    }

    #[test]
    fn offset_greedy_tracks_shifted_difference(seed in any::<u64>(), run in any::<u64>(), frac in -1.0..=1.0f64, n in 1u64..300) {
        // |Γ_R - Γ_S + δ| <= γ at every epoch
        let pair = random_pair(seed, 4, 12);
        let gamma = pair.float_moments().gamma;
        let delta = frac * gamma;
        let mut runner = Runner::new(&pair, PolicySpec::GreedyOffset { delta, tie: TieBreak::PreferR }, run).unwrap();
        for _ in 0..n {
            runner.step().unwrap();
            prop_assert!((runner.state().delta() + delta).abs() <= gamma + 1e-12);
        }
    }

    #[test]
    fn moment_relations(seed in any::<u64>()) {
        let pair = random_pair(seed, 4, 12);
        let m = pair.moments();
        prop_assert!(m.mu > Rational::from_integer(0.into()));
        prop_assert!(m.mu <= m.gamma);
        prop_assert!(m.sigma_r2 <= &m.mu * &m.gamma);
        prop_assert!(m.sigma_s2 <= &m.mu * &m.gamma);
        let swapped = pair.swapped();
        prop_assert_eq!(&swapped.moments().sigma_r2, &m.sigma_s2);
        prop_assert_eq!(&swapped.moments().sigma_s2, &m.sigma_r2);
        prop_assert_eq!(&swapped.moments().mu, &m.mu);
        prop_assert_eq!(&swapped.moments().gamma, &m.gamma);
        // re-derive with the labels in reverse order
        let rev = |d: &LabelDistribution| {
            LabelDistribution::new(d.probs().iter().rev().cloned().collect()).unwrap()
        };
        let again = derive_moments(&rev(pair.r()), &rev(pair.s())).unwrap();
        prop_assert_eq!(&again, m);
    }
}
