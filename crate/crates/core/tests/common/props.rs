//! Property checks shared by the property suite and the acceptance run.

use joinpolicy::engine::*;
use joinpolicy::exact::{is_row_stochastic, DeltaChain, DEFAULT_STATE_CAP};
use joinpolicy::{Source, SourcePair};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use super::random_pair;

pub fn tie_strategy() -> impl Strategy<Value = TieBreak> {
    prop_oneof![
        Just(TieBreak::PreferR),
        Just(TieBreak::PreferS),
        Just(TieBreak::AlternateFromR),
        (0.0..=1.0f64).prop_map(|p| TieBreak::Random { p }),
    ]
}

pub fn pair_of(seed: u64) -> SourcePair {
    random_pair(seed, 4, 12)
}

fn gamma_units(pair: &SourcePair) -> u128 {
    pair.r_units()
        .iter()
        .chain(pair.s_units())
        .copied()
        .max()
        .expect("nonempty support") as u128
}

/// `|Γ_R - Γ_S| <= γ` after every greedy epoch.
pub fn delta_within_gamma(seed: u64, run: u64, n: u64, tie: TieBreak) -> Result<(), TestCaseError> {
    let pair = pair_of(seed);
    let g = gamma_units(&pair) as i128;
    let mut runner = Runner::new(&pair, PolicySpec::Greedy { tie }, run).unwrap();
    for _ in 0..n {
        runner.step().unwrap();
        prop_assert!(runner.state().delta_units().abs() <= g);
    }
    Ok(())
}

/// For every integer `x` in `[0, n]`:
/// `Γ_R[x] < Γ_S[n-x] - γ` implies `R_G(n) > x`, and
/// `R_G(n) > x` implies `Γ_R[x] <= Γ_S[n-x] + γ`.
pub fn selection_sandwich(seed: u64, run: u64, n: u64, tie: TieBreak) -> Result<(), TestCaseError> {
    let pair = pair_of(seed);
    let g = gamma_units(&pair);
    let mut runner = Runner::new(&pair, PolicySpec::Greedy { tie }, run).unwrap();
    let r_g = runner.advance_to(n).unwrap().r_count();
    let mut r_tape = LabelTape::new(run, Source::R);
    let mut s_tape = LabelTape::new(run, Source::S);
    for x in 0..=n {
        let a = r_tape.prefix_units(&pair, x);
        let b = s_tape.prefix_units(&pair, n - x);
        if a + g < b {
            prop_assert!(r_g > x, "x = {}", x);
        }
        if r_g > x {
            prop_assert!(a <= b + g, "x = {}", x);
        }
    }
    Ok(())
}

pub const POLICIES: [PolicySpec; 4] = [
    PolicySpec::Greedy {
        tie: TieBreak::PreferR,
    },
    PolicySpec::Alternating,
    PolicySpec::Bernoulli { alpha: 0.3 },
    PolicySpec::Restorative {
        alpha: 0.5,
        alpha1: 0.2,
        alpha2: 0.8,
    },
];

/// Incremental match count and Γ sums equal their recomputation.
pub fn recount_agrees(seed: u64, run: u64, n: u64, policy: PolicySpec) -> Result<(), TestCaseError> {
    let pair = pair_of(seed);
    let trace = run_policy(&pair, policy, n, run).unwrap();
    let st = &trace.final_state;
    prop_assert_eq!(st.matches(), st.recount_matches());
    prop_assert_eq!(
        st.recount_gammas(&pair),
        (st.gamma_r_units(), st.gamma_s_units())
    );
    prop_assert_eq!(st.r_count() + st.s_count(), n);
    prop_assert_eq!(st.n_r().iter().sum::<u64>(), st.r_count());
    prop_assert_eq!(st.n_s().iter().sum::<u64>(), st.s_count());
    prop_assert!(trace.records.windows(2).all(|w| w[0].m <= w[1].m));
    Ok(())
}

/// `R(2k) = k` for the alternating policy.
pub fn alternating_split(seed: u64, run: u64, n: u64) -> Result<(), TestCaseError> {
    let pair = pair_of(seed);
    let trace = run_policy(&pair, PolicySpec::Alternating, n, run).unwrap();
    for rec in &trace.records {
        if rec.epoch % 2 == 0 {
            prop_assert_eq!(rec.r, rec.epoch / 2);
        }
    }
    Ok(())
}

pub fn replay_identical(seed: u64, run: u64, n: u64, tie: TieBreak) -> Result<(), TestCaseError> {
    let pair = pair_of(seed);
    let a = run_coupled(&pair, n, run, tie).unwrap();
    let b = run_coupled(&pair, n, run, tie).unwrap();
    prop_assert_eq!(a.records, b.records);
    Ok(())
}

pub const CHAIN_TIES: [TieBreak; 3] = [
    TieBreak::PreferR,
    TieBreak::PreferS,
    TieBreak::Random { p: 0.25 },
];

pub fn chain_row_stochastic(seed: u64, tie: TieBreak) -> Result<(), TestCaseError> {
    let pair = pair_of(seed);
    let chain = DeltaChain::build(&pair, tie, DEFAULT_STATE_CAP).unwrap();
    prop_assert!(is_row_stochastic(&chain));
    Ok(())
}
