//! Exact rational computation of expectations, optimal values and the
//! constants of the greedy versus alternating comparison.

mod chain;
mod closed_form;
mod constants;
mod discount;
mod dp;
mod expectation;

pub use chain::{
    is_row_stochastic, max_abs_state, ChainDump, ChainEdge, ChainStructure, DeltaChain,
    DEFAULT_STATE_CAP,
};
pub use closed_form::eval_closed_form_example;
pub use constants::{catch_up_lag, catch_up_lag_bound, expectation_gap_limit, parity_limits, ParityLimits};
pub use discount::{discounted_alternating, discounted_values, DiscountedValues};
pub use dp::{dp_optimal_value, dp_optimal_value_capped, enumerate_nonadaptive_values, DEFAULT_LAYER_CAP, MAX_HORIZON};
pub use expectation::{
    alternating_expectation, alternating_increment, greedy_expectation, ExpectationSeries,
};
