//! Closed form of `E M_G(n)` for the fair coin against the two-headed coin.

use std::f64::consts::PI;

/// Evaluates
/// `n²/8 + n/16 - 7/64 + [3 sin((n-1)β) + 16 sin((n-3)β) - 9√7 cos((n-1)β)] / (2^((n+11)/2) √7)`
/// with `β = π - arctan √7`. Only meaningful for the illustrative pair.
pub fn eval_closed_form_example(n: u64) -> f64 {
    let nf = n as f64;
    let sqrt7 = 7f64.sqrt();
    let beta = PI - sqrt7.atan();
    let poly = nf * nf / 8.0 + nf / 16.0 - 7.0 / 64.0;
    let osc = 3.0 * ((nf - 1.0) * beta).sin() + 16.0 * ((nf - 3.0) * beta).sin()
        - 9.0 * sqrt7 * ((nf - 1.0) * beta).cos();
    poly + osc / (2f64.powf((nf + 11.0) / 2.0) * sqrt7)
}
