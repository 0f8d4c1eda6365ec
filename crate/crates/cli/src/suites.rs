//! The `verify` suites.
//!
//! Each suite turns one claim about greedy or alternating reading into
//! result rows. Monte Carlo suites share one coupled batch of
//! `replications` paths of `n_epochs` epochs, and the exact suites share
//! one expectation series, so a full run pays for each only once.

use std::cell::OnceCell;

use anyhow::Result;
use joinpolicy::batch::{coupled_batch, policy_batch, CoupledSummary};
use joinpolicy::engine::PolicySpec;
use joinpolicy::exact::{
    alternating_expectation, catch_up_lag, catch_up_lag_bound, dp_optimal_value,
    enumerate_nonadaptive_values, expectation_gap_limit, greedy_expectation, parity_limits,
    ExpectationSeries,
};
use joinpolicy::rational::{format_rational, int, to_f64, Rational};
use joinpolicy::rng::mix64;
use joinpolicy::stats::*;
use joinpolicy::{Error, SourcePair};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::output::{Row, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// Dynamic programming value equals the greedy value and beats every
    /// fixed read sequence.
    Optimality,
    /// Variance and normal fit of `(R_G(n) - n/2)/√n`.
    SelectionClt,
    /// Standardized match counts of greedy and alternating at `α = 1/2`.
    MatchClt,
    /// Standardized match count under Bernoulli sampling.
    BernoulliClt,
    /// `(E M_G(n) - E M_A(n))/n` against `(σ_R² + σ_S²)/(8μ)`.
    GapLimit,
    /// Greedy expectation against the telescoped sum of `E|Δ_k|`.
    GapIdentity,
    /// Odd and even limits of the per-epoch expectation gap.
    ParityLimits,
    /// `E M_A(n) <= E M_G(n) <= E M_A(n + k)`.
    ExpectationSandwich,
    /// `(M_G - M_A)/n^{5/4}` against the normal scale mixture.
    MixtureLimit,
    /// `(n - T_n)/(2√n)` against the folded normal.
    StoppingTime,
    /// Exceedance frequencies of `R_G(n)` against the exponential bound.
    Hoeffding,
    /// Sign changes of `M_G - M_A` along single paths.
    Signs,
}

impl Suite {
    pub const ALL: [Suite; 12] = [
        Suite::Optimality,
        Suite::SelectionClt,
        Suite::MatchClt,
        Suite::BernoulliClt,
        Suite::GapLimit,
        Suite::GapIdentity,
        Suite::ParityLimits,
        Suite::ExpectationSandwich,
        Suite::MixtureLimit,
        Suite::StoppingTime,
        Suite::Hoeffding,
        Suite::Signs,
    ];

    pub fn name(self) -> String {
        serde_json::to_value(self)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .expect("suite names serialize as strings")
    }
}

// Tags mixed into the master seed for batches other than the shared one.
const BERNOULLI_TAG: u64 = 0xB0;
const PILOT_TAG: u64 = 0x9170;
const FLAT_TAG: u64 = 0xF1A7;

pub struct Context<'a> {
    cfg: &'a ExperimentConfig,
    pair: &'a SourcePair,
    seed: u64,
    coupled: OnceCell<Vec<CoupledSummary>>,
    series: OnceCell<ExpectationSeries>,
}

impl<'a> Context<'a> {
    pub fn new(cfg: &'a ExperimentConfig, pair: &'a SourcePair, seed: u64) -> Self {
        Self {
            cfg,
            pair,
            seed,
            coupled: OnceCell::new(),
            series: OnceCell::new(),
        }
    }

    fn n(&self) -> u64 {
        self.cfg.n_epochs
    }

    fn coupled(&self) -> Result<&[CoupledSummary]> {
        if self.coupled.get().is_none() {
            if self.n() < 2 {
                anyhow::bail!("coupled suites need n_epochs >= 2");
            }
            let runs = coupled_batch(self.pair, self.n(), self.cfg.replications, self.seed, self.cfg.tie)?;
            let _ = self.coupled.set(runs);
        }
        Ok(self.coupled.get().expect("initialized above"))
    }

    /// Series long enough for the sandwich check at the exact horizon.
    fn series(&self) -> Result<&ExpectationSeries> {
        if self.series.get().is_none() {
            let len = self.cfg.verify.exact_horizon + catch_up_lag(self.pair) as usize;
            let series = ExpectationSeries::for_pair(self.pair, self.cfg.tie, len)?;
            let _ = self.series.set(series);
        }
        Ok(self.series.get().expect("initialized above"))
    }

    fn mc_params(&self) -> serde_json::Value {
        json!({"n": self.n(), "reps": self.cfg.replications, "seed": self.seed})
    }
}

pub fn run_suite(suite: Suite, ctx: &Context) -> Result<Vec<Row>> {
    match suite {
        Suite::Optimality => optimality(ctx),
        Suite::SelectionClt => selection_clt(ctx),
        Suite::MatchClt => match_clt(ctx),
        Suite::BernoulliClt => bernoulli_clt(ctx),
        Suite::GapLimit => gap_limit(ctx),
        Suite::GapIdentity => gap_identity(ctx),
        Suite::ParityLimits => parity(ctx),
        Suite::ExpectationSandwich => sandwich(ctx),
        Suite::MixtureLimit => mixture_limit(ctx),
        Suite::StoppingTime => stopping(ctx),
        Suite::Hoeffding => hoeffding(ctx),
        Suite::Signs => signs(ctx),
    }
}

fn rat(x: &Rational) -> serde_json::Value {
    format_rational(x).into()
}

fn optimality(ctx: &Context) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for horizon in 1..=ctx.cfg.verify.dp_horizon {
        let dp = dp_optimal_value(ctx.pair, horizon)?;
        let greedy = greedy_expectation(ctx.pair, horizon, ctx.cfg.tie)?;
        let best_fixed = enumerate_nonadaptive_values(ctx.pair, horizon)?
            .into_iter()
            .map(|(_, v)| v)
            .max()
            .expect("at least one sequence");
        rows.push(Row::exact(
            format!("optimal value at horizon {horizon}"),
            json!({"horizon": horizon, "best_fixed_sequence": format_rational(&best_fixed)}),
            rat(&dp),
            rat(&greedy),
            dp == greedy && dp >= best_fixed,
        ));
    }
    Ok(rows)
}

/// Variance row plus a KS row against the centered normal.
fn clt_rows(ctx: &Context, label: &str, z: &[f64], target: f64, rel: f64, ks_max: Option<f64>) -> Result<Vec<Row>> {
    let var = sample_variance(z);
    let mut rows = vec![Row::checked(
        format!("variance of {label}"),
        ctx.mc_params(),
        var,
        target,
        Tolerance::Relative(rel),
    )];
    if let Some(ks_max) = ks_max {
        if target > 0.0 {
            let ks = ReferenceCdf::Normal { variance: target }.ks(z)?;
            rows.push(Row::checked(
                format!("KS of {label} to N(0, {target})"),
                ctx.mc_params(),
                ks,
                ks_max,
                Tolerance::AtMost(ks_max),
            ));
        } else {
            rows.push(Row::info(
                format!("KS of {label}"),
                ctx.mc_params(),
                "skipped: limit variance is zero",
            ));
        }
    }
    Ok(rows)
}

fn selection_clt(ctx: &Context) -> Result<Vec<Row>> {
    let runs = ctx.coupled()?;
    let n = ctx.n() as f64;
    let z: Vec<f64> = runs
        .iter()
        .map(|r| (r.r_greedy as f64 - n / 2.0) / n.sqrt())
        .collect();
    let tol = &ctx.cfg.tolerances;
    clt_rows(
        ctx,
        "(R_G(n) - n/2)/sqrt(n)",
        &z,
        ctx.pair.float_moments().sigma_rg2,
        tol.selection_variance_rel,
        Some(tol.selection_ks),
    )
}

fn match_clt(ctx: &Context) -> Result<Vec<Row>> {
    let runs = ctx.coupled()?;
    let m = ctx.pair.float_moments();
    let target = clt_variance_target(m, 0.5, Sampling::Controlled);
    let tol = &ctx.cfg.tolerances;
    let mut rows = Vec::new();
    for (name, pick) in [
        ("greedy", (|r: &CoupledSummary| r.m_greedy) as fn(&CoupledSummary) -> u64),
        ("alternating", |r: &CoupledSummary| r.m_alternating),
    ] {
        let z: Vec<f64> = runs
            .iter()
            .map(|r| standardize_matches(pick(r), ctx.n(), m.mu, 0.5))
            .collect();
        rows.extend(clt_rows(
            ctx,
            &format!("standardized {name} matches"),
            &z,
            target,
            tol.match_variance_rel,
            Some(tol.match_ks),
        )?);
    }
    Ok(rows)
}

fn bernoulli_clt(ctx: &Context) -> Result<Vec<Row>> {
    let alpha = ctx.cfg.verify.bernoulli_alpha;
    let m = ctx.pair.float_moments();
    let runs = policy_batch(
        ctx.pair,
        PolicySpec::Bernoulli { alpha },
        ctx.n(),
        ctx.cfg.replications,
        mix64(ctx.seed ^ BERNOULLI_TAG),
    )?;
    let z: Vec<f64> = runs
        .iter()
        .map(|r| standardize_matches(r.m, ctx.n(), m.mu, alpha))
        .collect();
    clt_rows(
        ctx,
        &format!("standardized Bernoulli({alpha}) matches"),
        &z,
        clt_variance_target(m, alpha, Sampling::Bernoulli),
        ctx.cfg.tolerances.bernoulli_variance_rel,
        None,
    )
}

fn gap_limit(ctx: &Context) -> Result<Vec<Row>> {
    let h = ctx.cfg.verify.exact_horizon;
    let series = ctx.series()?;
    let per_n = to_f64(&series.gap(h)) / h as f64;
    let limit = to_f64(&expectation_gap_limit(ctx.pair));
    let params = json!({"horizon": h, "limit": format_rational(&expectation_gap_limit(ctx.pair))});
    let tol = &ctx.cfg.tolerances;
    let mut rows = vec![Row::checked(
        format!("gap/n at n={h}"),
        params.clone(),
        per_n,
        limit,
        Tolerance::Relative(tol.gap_rel),
    )];
    if let Some(abs) = tol.gap_abs {
        rows.push(Row::checked(
            format!("gap/n at n={h} (absolute)"),
            params,
            per_n,
            limit,
            Tolerance::Absolute(abs),
        ));
    }
    Ok(rows)
}

fn gap_identity(ctx: &Context) -> Result<Vec<Row>> {
    let h = ctx.cfg.verify.exact_horizon;
    let series = ctx.series()?;
    let mu = &ctx.pair.moments().mu;
    let mut sum = Rational::from_integer(0.into());
    let mut first_bad = None;
    for n in 1..=h {
        if n >= 2 {
            sum += series.abs_delta(n - 1);
        }
        let nn = int(n as i64);
        let telescoped = &sum / int(2) + &nn * (&nn - int(1)) * mu / int(4);
        if &telescoped != series.greedy(n) && first_bad.is_none() {
            first_bad = Some(n);
        }
    }
    Ok(vec![Row::exact(
        format!("E M_G(n) = (1/2) sum E|Delta_k| + n(n-1)mu/4 for n <= {h}"),
        json!({"horizon": h}),
        first_bad.map_or_else(|| "all equal".to_string(), |n| format!("differs at n={n}")),
        "all equal",
        first_bad.is_none(),
    )])
}

fn parity(ctx: &Context) -> Result<Vec<Row>> {
    let h = ctx.cfg.verify.exact_horizon;
    let series = ctx.series()?;
    let limit = expectation_gap_limit(ctx.pair);
    let quarter = &ctx.pair.moments().mu / int(4);
    let abs = ctx.cfg.tolerances.parity_abs;
    let mut rows = Vec::new();
    for (name, n, target) in [
        ("odd", if h % 2 == 1 { h } else { h - 1 }, &limit - &quarter),
        ("even", if h.is_multiple_of(2) { h } else { h - 1 }, &limit + &quarter),
    ] {
        rows.push(Row::checked(
            format!("{name} per-epoch gap at n={n}"),
            json!({"n": n, "limit": format_rational(&target)}),
            to_f64(&series.increment_gap(n)),
            to_f64(&target),
            Tolerance::Absolute(abs),
        ));
    }
    match parity_limits(ctx.pair, ctx.cfg.tie, h as u64) {
        Ok(p) => rows.push(Row::exact(
            "stationary (1/2) E|Delta| equals even limit",
            json!({"geometric_rate": p.geometric_rate}),
            rat(&p.stationary_even),
            rat(&p.even),
            p.stationary_even == p.even,
        )),
        Err(Error::NotErgodic(why)) => rows.push(Row::info(
            "stationary (1/2) E|Delta|",
            json!({}),
            format!("skipped: chain not ergodic ({why})"),
        )),
        Err(e) => return Err(e.into()),
    }
    Ok(rows)
}

fn sandwich(ctx: &Context) -> Result<Vec<Row>> {
    let v = &ctx.cfg.verify;
    let series = ctx.series()?;
    let k = catch_up_lag(ctx.pair);
    let bound = catch_up_lag_bound(ctx.pair);
    let violations: Vec<usize> = (v.sandwich_from..=v.exact_horizon)
        .filter(|&n| {
            let g = series.greedy(n);
            alternating_expectation(ctx.pair, n as u64) > *g
                || *g > alternating_expectation(ctx.pair, n as u64 + k)
        })
        .collect();
    Ok(vec![
        Row::exact(
            format!(
                "E M_A(n) <= E M_G(n) <= E M_A(n+{k}) for n in [{}, {}]",
                v.sandwich_from, v.exact_horizon
            ),
            json!({"k": k, "first_violations": &violations[..violations.len().min(10)]}),
            violations.len(),
            0,
            violations.is_empty(),
        ),
        Row::exact(
            "catch-up lag within its bound",
            json!({"k": k}),
            k,
            bound,
            k <= bound,
        ),
    ])
}

fn mixture_limit(ctx: &Context) -> Result<Vec<Row>> {
    let runs = ctx.coupled()?;
    let scale = (ctx.n() as f64).powf(1.25);
    let x: Vec<f64> = runs.iter().map(|r| r.d() as f64 / scale).collect();
    let mix = MixtureCdf::for_moments(ctx.pair.float_moments());
    let second = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
    let mut rows = vec![Row::info(
        "second moment of (M_G - M_A)/n^(5/4)",
        json!({"mixture_variance": mix.variance()}),
        second,
    )];
    if mix.mixing_variance() > 0.0 {
        let ks = ReferenceCdf::Mixture(mix).ks(&x)?;
        rows.push(Row::checked(
            "KS of (M_G - M_A)/n^(5/4) to normal scale mixture",
            ctx.mc_params(),
            ks,
            ctx.cfg.tolerances.mixture_ks,
            Tolerance::AtMost(ctx.cfg.tolerances.mixture_ks),
        ));
    } else {
        let max = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        rows.push(Row::checked(
            "max |M_G - M_A|/n^(5/4) for a zero-variance pair",
            ctx.mc_params(),
            max,
            0.0,
            Tolerance::Absolute(0.0),
        ));
    }
    Ok(rows)
}

fn stopping(ctx: &Context) -> Result<Vec<Row>> {
    let runs = ctx.coupled()?;
    let n = ctx.n();
    let x: Vec<f64> = runs
        .iter()
        .map(|r| (n - r.t_n) as f64 / (2.0 * (n as f64).sqrt()))
        .collect();
    let variance = ctx.pair.float_moments().sigma_rg2;
    let split = runs.iter().filter(|r| r.a_n).count() as f64 / runs.len() as f64;
    let mut rows = vec![Row::info("fraction of paths with A_n", ctx.mc_params(), split)];
    if variance > 0.0 {
        let ks = ReferenceCdf::FoldedNormal { variance }.ks(&x)?;
        rows.push(Row::checked(
            format!("KS of (n - T_n)/(2 sqrt(n)) to |N(0, {variance})|"),
            ctx.mc_params(),
            ks,
            ctx.cfg.tolerances.stopping_ks,
            Tolerance::AtMost(ctx.cfg.tolerances.stopping_ks),
        ));
    } else {
        rows.push(Row::info(
            "KS of (n - T_n)/(2 sqrt(n))",
            ctx.mc_params(),
            "skipped: limit variance is zero",
        ));
    }
    Ok(rows)
}

fn hoeffding(ctx: &Context) -> Result<Vec<Row>> {
    let runs = ctx.coupled()?;
    let r: Vec<u64> = runs.iter().map(|r| r.r_greedy).collect();
    let v = &ctx.cfg.verify;
    let table = hoeffding_certify(&r, ctx.n(), ctx.pair.float_moments(), &v.hoeffding_t, v.hoeffding_alpha)?;
    Ok(table
        .into_iter()
        .map(|row| {
            let mut params = ctx.mc_params();
            params["t"] = row.t.into();
            params["exceedances"] = row.exceedances.into();
            params["confidence"] = (1.0 - v.hoeffding_alpha).into();
            Row::checked(
                format!("upper confidence of P(|R_G(n) - n/2| > t sqrt(n)) at t={}", row.t),
                params,
                row.upper_confidence,
                row.bound,
                Tolerance::AtMost(row.bound),
            )
        })
        .collect())
}

fn both_signs_fraction(runs: &[CoupledSummary]) -> f64 {
    runs.iter().filter(|r| r.signs.both_signs()).count() as f64 / runs.len() as f64
}

fn signs(ctx: &Context) -> Result<Vec<Row>> {
    let reps = ctx.cfg.verify.sign_reps;
    let n = ctx.n();
    if n < 2 {
        anyhow::bail!("coupled suites need n_epochs >= 2");
    }
    let params = json!({"n": n, "reps": reps, "seed": ctx.seed});
    if ctx.pair.is_degenerate() {
        let runs = coupled_batch(ctx.pair, n, reps, mix64(ctx.seed ^ FLAT_TAG), ctx.cfg.tie)?;
        let flat = runs.iter().filter(|r| r.signs.is_identically_zero()).count();
        return Ok(vec![Row::exact(
            "paths with M_G - M_A identically zero",
            params,
            flat,
            reps,
            flat == reps,
        )]);
    }
    let pilot = coupled_batch(ctx.pair, n, reps, mix64(ctx.seed ^ PILOT_TAG), ctx.cfg.tie)?;
    let f_pilot = both_signs_fraction(&pilot);
    let se = (f_pilot * (1.0 - f_pilot) / reps as f64).sqrt();
    let threshold = (f_pilot - 4.0 * se).max(0.5);
    let shared = ctx.coupled()?;
    let main = if shared.len() >= reps {
        both_signs_fraction(&shared[..reps])
    } else {
        both_signs_fraction(&coupled_batch(ctx.pair, n, reps, ctx.seed, ctx.cfg.tie)?)
    };
    let report = sign_change_stats(&shared.iter().map(|r| r.signs).collect::<Vec<_>>());
    let mut row = Row::checked(
        "fraction of paths where M_G - M_A takes both signs",
        json!({"n": n, "reps": reps, "seed": ctx.seed, "pilot_fraction": f_pilot}),
        main,
        threshold,
        Tolerance::AtLeast(threshold),
    );
    row.pass &= main > 0.5;
    Ok(vec![
        row,
        Row::info("mean sign changes per path", ctx.mc_params(), report.mean_sign_changes),
        Row::info("mean fraction of epochs with M_G < M_A", ctx.mc_params(), report.mean_negative_fraction),
        Row::info("max |M_G - M_A|/n^(5/4) over paths and epochs", ctx.mc_params(), report.max_scaled),
    ])
}

