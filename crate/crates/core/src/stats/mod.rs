//! Estimators and reference distributions for checking limit theorems
//! against Monte Carlo output.

mod clt;
mod hoeffding;
mod ks;
mod mixture;
mod normal;
mod quadrature;
mod reference;
mod signs;

pub use clt::{
    clt_variance_target, correlation, mean, median, sample_variance, standardize_matches,
    Sampling,
};
pub use hoeffding::{
    clopper_pearson_upper, hoeffding_bound, hoeffding_certify, hoeffding_min_n, HoeffdingRow,
};
pub use ks::{ks_critical_value, ks_distance};
pub use mixture::{MixtureCdf, MIXTURE_TOLERANCE};
pub use normal::{
    centered_normal_cdf, folded_normal_cdf, folded_normal_mean, folded_normal_quantile,
    normal_cdf, normal_quantile,
};
pub use quadrature::integrate;
pub use reference::ReferenceCdf;
pub use signs::{sign_change_stats, SignReport, SignTracker};
