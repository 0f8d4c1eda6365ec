//! Batch experiment runner for the joinpolicy engine.
//!
//! One invocation reads an [`ExperimentConfig`], runs one command and
//! writes its outputs into a fresh run directory:
//!
//! - `results.json` holds the [`ResultRow`]s;
//! - `traces/*.csv` holds per-replication traces (`simulate`, `compare`);
//! - `chain.json` and `expectations.json` hold exact output (`exact`).
//!
//! Replication `i` always uses `seed_stream(seed, i)`, so outputs are
//! identical across thread counts.

pub mod config;
pub mod output;
pub mod suites;

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context as _, Result};
use joinpolicy::batch::{coupled_batch, policy_batch};
use joinpolicy::engine::{run_coupled, run_policy, write_coupled_csv, write_policy_csv};
use joinpolicy::exact::{
    catch_up_lag, dp_optimal_value, expectation_gap_limit, DeltaChain, ExpectationSeries,
    DEFAULT_STATE_CAP, MAX_HORIZON,
};
use joinpolicy::rational::{format_rational, int};
use joinpolicy::rng::seed_stream;
use joinpolicy::SourcePair;
use serde::Serialize;
use serde_json::json;

pub use config::{Command, ExperimentConfig};
pub use output::{ResultRow, Row, Tolerance};
pub use suites::Suite;

use output::{create_run_dir, write_json, ResultsFile, SCHEMA_VERSION, TRACE_SCHEMA_VERSION};

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub command: Command,
    pub config: PathBuf,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub struct Outcome {
    pub run_dir: PathBuf,
    pub rows: Vec<ResultRow>,
}

impl Outcome {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Loads the config, runs the command and writes the run directory.
pub fn run(inv: &Invocation) -> Result<Outcome> {
    let cfg = ExperimentConfig::from_file(&inv.config)?;
    let base = inv.config.parent().unwrap_or(Path::new("."));
    run_config(&cfg, base, inv)
}

pub fn run_config(cfg: &ExperimentConfig, base: &Path, inv: &Invocation) -> Result<Outcome> {
    cfg.validate()
        .with_context(|| format!("experiment {}: invalid config", cfg.id))?;
    if let Some(declared) = cfg.command {
        if declared != inv.command {
            bail!(
                "experiment {}: config declares command {declared} but {} was requested",
                cfg.id,
                inv.command
            );
        }
    }
    let pair = cfg
        .pair
        .load(base)
        .with_context(|| format!("experiment {}: loading pair", cfg.id))?;
    let seed = inv.seed.unwrap_or(cfg.seed);
    let root = inv
        .out
        .clone()
        .or_else(|| cfg.output.as_ref().map(|p| base.join(p)))
        .unwrap_or_else(|| PathBuf::from("runs"));
    let dir = create_run_dir(&root, &cfg.id)?;
    write_json(&dir.join("config.json"), cfg)?;

    let mut files = vec!["config.json".to_string()];
    let rows = match inv.command {
        Command::Simulate => simulate(cfg, &pair, seed, &dir, &mut files),
        Command::Exact => exact(cfg, &pair, &dir, &mut files),
        Command::Verify => verify(cfg, &pair, seed),
        Command::Compare => compare(cfg, &pair, seed, &dir, &mut files),
    }
    .with_context(|| format!("experiment {}", cfg.id))?;

    let rows: Vec<ResultRow> = rows
        .into_iter()
        .map(|(suite, secs, row)| ResultRow {
            experiment: cfg.id.clone(),
            command: inv.command.to_string(),
            suite,
            parameters: row.parameters,
            metric: row.metric,
            value: row.value,
            target: row.target,
            tolerance: row.tolerance,
            pass: row.pass,
            wall_time_s: secs,
        })
        .collect();
    files.push("results.json".into());
    let results = ResultsFile {
        schema_version: SCHEMA_VERSION,
        trace_schema_version: TRACE_SCHEMA_VERSION,
        experiment: &cfg.id,
        command: inv.command.to_string(),
        seed,
        pair: serde_json::to_value(pair.definition())?,
        files,
        all_pass: rows.iter().all(|r| r.pass),
        rows: &rows,
    };
    write_json(&dir.join("results.json"), &results)?;
    Ok(Outcome { run_dir: dir, rows })
}

type Timed = Vec<(Option<String>, f64, Row)>;

fn untimed(rows: Vec<Row>, secs: f64) -> Timed {
    rows.into_iter().map(|r| (None, secs, r)).collect()
}

fn traces_dir(dir: &Path) -> Result<PathBuf> {
    let t = dir.join("traces");
    std::fs::create_dir_all(&t)?;
    Ok(t)
}

fn csv_writer(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn simulate(
    cfg: &ExperimentConfig,
    pair: &SourcePair,
    seed: u64,
    dir: &Path,
    files: &mut Vec<String>,
) -> Result<Timed> {
    let traces = traces_dir(dir)?;
    let mut rows = Vec::new();
    for policy in cfg.policies_or_default() {
        let start = Instant::now();
        let name = policy.name();
        for i in 0..cfg.max_traces.min(cfg.replications) as u64 {
            let trace = run_policy(pair, policy, cfg.n_epochs, seed_stream(seed, i))?;
            let file = format!("{name}-{i:04}.csv");
            write_policy_csv(csv_writer(&traces.join(&file))?, &trace.records)?;
            files.push(format!("traces/{file}"));
        }
        let runs = policy_batch(pair, policy, cfg.n_epochs, cfg.replications, seed)?;
        let k = runs.len() as f64;
        let n = cfg.n_epochs as f64;
        let params = json!({"policy": policy, "n": cfg.n_epochs, "reps": cfg.replications, "seed": seed});
        let mean_m = runs.iter().map(|r| r.m as f64).sum::<f64>() / k;
        let mean_ratio = runs.iter().map(|r| r.r as f64 / n).sum::<f64>() / k;
        let secs = start.elapsed().as_secs_f64();
        rows.extend(untimed(
            vec![
                Row::info(format!("{name}: mean M(n)"), params.clone(), mean_m),
                Row::info(format!("{name}: mean R(n)/n"), params, mean_ratio),
            ],
            secs,
        ));
    }
    Ok(rows)
}

#[derive(Serialize)]
struct Versioned<T: Serialize> {
    schema_version: u32,
    #[serde(flatten)]
    body: T,
}

#[derive(Serialize)]
struct ExpectationRow {
    n: usize,
    greedy: String,
    alternating: String,
    gap: String,
}

fn exact(cfg: &ExperimentConfig, pair: &SourcePair, dir: &Path, files: &mut Vec<String>) -> Result<Timed> {
    let start = Instant::now();
    let n = cfg.n_epochs as usize;
    let chain = DeltaChain::build(pair, cfg.tie, DEFAULT_STATE_CAP)?;
    write_json(
        &dir.join("chain.json"),
        &Versioned {
            schema_version: SCHEMA_VERSION,
            body: chain.dump(),
        },
    )?;
    files.push("chain.json".into());
    let mu = pair.moments().mu.clone();
    let series = ExpectationSeries::compute(&chain, &mu, n);
    let table: Vec<ExpectationRow> = (1..=n)
        .map(|k| {
            let greedy = series.greedy(k);
            let alt = greedy - series.gap(k);
            ExpectationRow {
                n: k,
                greedy: format_rational(greedy),
                alternating: format_rational(&alt),
                gap: format_rational(&series.gap(k)),
            }
        })
        .collect();
    write_json(
        &dir.join("expectations.json"),
        &Versioned {
            schema_version: SCHEMA_VERSION,
            body: json!({"tie": cfg.tie, "expectations": table}),
        },
    )?;
    files.push("expectations.json".into());

    let params = json!({"n": n, "tie": cfg.tie});
    let greedy = series.greedy(n).clone();
    let alternating = &greedy - series.gap(n);
    let limit = expectation_gap_limit(pair);
    let quarter = &mu / int(4);
    let mut rows = vec![
        Row::info("E M_G(n)", params.clone(), format_rational(&greedy)),
        Row::info("E M_A(n)", params.clone(), format_rational(&alternating)),
        Row::info("chain states", json!({}), chain.len()),
        Row::info("gap limit (sigma_R^2 + sigma_S^2)/(8 mu)", json!({}), format_rational(&limit)),
        Row::info("odd per-epoch gap limit", json!({}), format_rational(&(&limit - &quarter))),
        Row::info("even per-epoch gap limit", json!({}), format_rational(&(&limit + &quarter))),
        Row::info("catch-up lag", json!({}), catch_up_lag(pair)),
    ];
    if n <= MAX_HORIZON {
        let dp = dp_optimal_value(pair, n)?;
        rows.push(Row::exact(
            "optimal value E M*(n)",
            params,
            format_rational(&dp),
            format_rational(&greedy),
            dp == greedy,
        ));
    }
    Ok(untimed(rows, start.elapsed().as_secs_f64()))
}

fn verify(cfg: &ExperimentConfig, pair: &SourcePair, seed: u64) -> Result<Timed> {
    let ctx = suites::Context::new(cfg, pair, seed);
    let mut rows = Vec::new();
    for suite in cfg.suites_or_all() {
        let start = Instant::now();
        let out = suites::run_suite(suite, &ctx).with_context(|| format!("suite {}", suite.name()))?;
        let secs = start.elapsed().as_secs_f64();
        rows.extend(out.into_iter().map(|r| (Some(suite.name()), secs, r)));
    }
    Ok(rows)
}

fn compare(
    cfg: &ExperimentConfig,
    pair: &SourcePair,
    seed: u64,
    dir: &Path,
    files: &mut Vec<String>,
) -> Result<Timed> {
    if cfg.n_epochs < 2 {
        bail!("compare needs n_epochs >= 2");
    }
    let start = Instant::now();
    let traces = traces_dir(dir)?;
    for i in 0..cfg.max_traces.min(cfg.replications) as u64 {
        let trace = run_coupled(pair, cfg.n_epochs, seed_stream(seed, i), cfg.tie)?;
        let file = format!("coupled-{i:04}.csv");
        write_coupled_csv(csv_writer(&traces.join(&file))?, &trace.records)?;
        files.push(format!("traces/{file}"));
    }
    let runs = coupled_batch(pair, cfg.n_epochs, cfg.replications, seed, cfg.tie)?;
    let n = cfg.n_epochs as f64;
    let k = runs.len() as f64;
    let mean = |f: &dyn Fn(&joinpolicy::batch::CoupledSummary) -> f64| runs.iter().map(f).sum::<f64>() / k;
    let params = json!({"n": cfg.n_epochs, "reps": cfg.replications, "seed": seed, "tie": cfg.tie});
    let rows = vec![
        Row::info("mean M_G(n) - M_A(n)", params.clone(), mean(&|r| r.d() as f64)),
        Row::info("mean (M_G - M_A)/n^(5/4)", params.clone(), mean(&|r| r.d() as f64 / n.powf(1.25))),
        Row::info("mean G_n/n^(1/4)", params.clone(), mean(&|r| r.g_n / n.powf(0.25))),
        Row::info("mean (n - T_n)/(2 sqrt(n))", params.clone(), mean(&|r| (n - r.t_n as f64) / (2.0 * n.sqrt()))),
        Row::info("fraction of paths with A_n", params.clone(), mean(&|r| f64::from(u8::from(r.a_n)))),
        Row::info(
            "fraction of paths where M_G - M_A takes both signs",
            params,
            mean(&|r| f64::from(u8::from(r.signs.both_signs()))),
        ),
    ];
    Ok(untimed(rows, start.elapsed().as_secs_f64()))
}
