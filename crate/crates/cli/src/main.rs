use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use joinpolicy_cli::{run, Command, Invocation};

/// Reading-policy experiments: simulation, exact expectations and
/// verification suites.
#[derive(Debug, Parser)]
#[command(name = "joinpolicy", version)]
struct Args {
    command: Command,
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Master seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Root directory for run outputs; overrides the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, env = "JOINPOLICY_THREADS")]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Some(k) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: cannot start {k} worker threads: {e}");
            return ExitCode::from(2);
        }
    }
    let inv = Invocation {
        command: args.command,
        config: args.config,
        seed: args.seed,
        out: args.out,
    };
    match run(&inv) {
        Ok(outcome) => {
            for row in outcome.rows.iter().filter(|r| !r.pass) {
                eprintln!("FAIL {}: value {} target {:?}", row.metric, row.value, row.target);
            }
            let failed = outcome.rows.iter().filter(|r| !r.pass).count();
            println!(
                "{}: {} rows, {} failed",
                outcome.run_dir.display(),
                outcome.rows.len(),
                failed
            );
            if outcome.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
