//! `stit` — construct random tessellations, evaluate mixing bounds, run the
//! estimation experiments, and verify the engine's invariants.

mod commands;
mod config;

use clap::{Parser, Subcommand};
use config::RunConfig;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration; nothing was run. Exit code 2.
    Config(String),
    /// Failure during a run. Exit code 1.
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Runtime(e)
    }
}

impl From<stit_core::Error> for CliError {
    fn from(e: stit_core::Error) -> Self {
        CliError::Runtime(e.into())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.into())
    }
}

#[derive(Parser)]
#[command(
    name = "stit",
    version,
    about = "Random-tessellation simulation and mixing-rate toolkit",
    propagate_version = true
)]
struct Cli {
    /// TOML run configuration; flags below override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed (overrides config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo replicates (overrides config).
    #[arg(long, global = true)]
    replicates: Option<usize>,
    /// Output directory, or output file for `render` (overrides config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; 0 = all cores (overrides config).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the division process once and write a JSON snapshot plus an SVG.
    Simulate,
    /// Tabulate the analytic mixing bound over the configured grids.
    Bound,
    /// Estimate the mixing coefficient across window scales (CSV table).
    EstimateBeta,
    /// Run the invariant battery and report PASS/FAIL per check.
    Verify,
    /// Render a saved JSON snapshot to SVG.
    Render {
        /// Snapshot file produced by `stit simulate`.
        #[arg(long)]
        input: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(CliError::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(n) = cli.replicates {
        cfg.replicates = n.max(1);
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    if let Some(threads) = cli.threads {
        cfg.threads = threads;
    }
    if cfg.threads > 0 {
        // Ignore the error from double initialization (e.g. in tests).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build_global();
    }
    match cli.command {
        Command::Simulate => commands::simulate(&cfg),
        Command::Bound => commands::bound(&cfg),
        Command::EstimateBeta => commands::estimate_beta(&cfg),
        Command::Verify => commands::verify(&cfg),
        Command::Render { input } => commands::render(&cfg, &input, cli.out.as_deref()),
    }
}
