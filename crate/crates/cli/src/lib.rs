//! Command-line front end for the zdpool engine.
//!
//! Every subcommand is reachable through [`run`], which takes the argument
//! list and two writers and returns the process exit code, so tests drive
//! the CLI in-process.

mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{replicate_configs, run_series, FileSet};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Env var holding the default output directory for `simulate`/`replicate`.
pub const OUT_DIR_ENV: &str = "ZDPOOL_OUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, unreadable or incomplete config. Exit 2.
    #[error("{0}")]
    Usage(String),
    /// Well-formed input the engine rejects. Exit 1.
    #[error(transparent)]
    Domain(#[from] zdpool::Error),
    /// Output could not be written. Exit 1.
    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            _ => EXIT_DOMAIN,
        }
    }

    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }
}

const CSV_HELP: &str = "\
CSV columns (one header row, comma separated, empty cell = not applicable):

trajectory.csv   repetition 0 of every miner, one row per round
  series         label of the [[series]] entry (or the figure preset)
  miner          miner index, 0-based, in initial_powers order
  round          1-based round
  state          joint outcome CC, CD, DC or DD (pool action first)
  pool_payoff    realized pool payoff this round
  miner_payoff   realized miner payoff this round
  q_t            miner cooperation probability used this round
  p1, p2, p3, p4 pool memory-one strategy used this round
  E              miner payoff pinned by the pool strategy this round (the
                 mechanism's assignment, or the fixed strategy's value; empty
                 when the strategy pins nothing)

series.csv / figN.csv   per-round mean and standard error over repetitions
  series, miner, power, round
  q_mean, q_se             cooperation probability
  E_mean, E_se             pinned miner payoff
  miner_avg_mean, _se      cumulative average miner payoff
  pool_avg_mean, _se       cumulative average pool payoff

summary.csv / figN_summary.csv   one row per miner
  series, miner, power, repetitions, rounds
  final_q                  mean q at the last round
  rounds_to_threshold      first round of a 50-round run with mean q >= 0.99 (empty if none)
  miner_average, pool_average   mean cumulative average payoff over the horizon
  miner_tail, pool_tail         mean payoff over the tail window
  tail_window, clamp_events, degenerate_updates";

#[derive(Debug, Parser)]
#[command(
    name = "zdpool",
    version,
    about = "Zero-determinant pooled-mining simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify the game built from six parameters; exit 0 iff it is an IPD.
    Classify(ClassifyArgs),
    /// Zero-determinant strategy tools.
    #[command(subcommand)]
    Zd(ZdCommand),
    /// Run experiments described by a TOML config.
    #[command(after_long_help = CSV_HELP)]
    Simulate(SimulateArgs),
    /// Re-run a published figure with its constants baked in.
    #[command(after_long_help = CSV_HELP)]
    Replicate(ReplicateArgs),
}

/// Game parameters; defaults are the published values.
#[derive(Debug, Clone, Args)]
pub struct GameArgs {
    #[arg(long)]
    pub kp: Option<f64>,
    #[arg(long)]
    pub km: Option<f64>,
    #[arg(long)]
    pub pi: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub game: GameArgs,
    /// TOML file with keys k_pool, k_miner, pi, mu, sigma, rho. Flags
    /// override file values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum ZdCommand {
    /// Complete (p1, p4) to a ZD strategy that pins the miner's payoff.
    Derive {
        #[arg(long)]
        p1: f64,
        #[arg(long)]
        p4: f64,
        #[command(flatten)]
        game: GameArgs,
        #[arg(long)]
        json: bool,
    },
    /// Synthesize a strategy pinning the miner's payoff to a target.
    Target {
        #[arg(long)]
        payoff: f64,
        /// Explicit λ in (0, 1]; defaults to 0.95 of the largest feasible λ.
        #[arg(long)]
        scale: Option<f64>,
        #[command(flatten)]
        game: GameArgs,
        #[arg(long)]
        json: bool,
    },
    /// Sweep (p1, p4) for strategies that would pin the pool's own payoff.
    SelfControl {
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[command(flatten)]
        game: GameArgs,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub config: PathBuf,
    #[arg(long, env = OUT_DIR_ENV, default_value = "out")]
    pub out: PathBuf,
    /// Run repetitions on one thread.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Args)]
pub struct ReplicateArgs {
    #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
    pub figure: u8,
    #[arg(long, env = OUT_DIR_ENV, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, default_value_t = zdpool::presets::DEFAULT_SEED)]
    pub seed: u64,
    /// Override the published 100 repetitions.
    #[arg(long)]
    pub repetitions: Option<usize>,
    #[arg(long)]
    pub sequential: bool,
}

/// Parse `args` (program name first) and run. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                return EXIT_USAGE;
            }
            let _ = write!(stdout, "{text}");
            return EXIT_OK;
        }
    };
    match commands::dispatch(cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
