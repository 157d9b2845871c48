//! Batch command-line harness.
//!
//! Every run is determined by the config file plus flags. Exit codes: 0 on
//! success, 1 when a checked invariant fails, 2 on usage, config or I/O
//! errors.

pub mod amplitude_file;
pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{cmd_bellscan, cmd_experiment, cmd_scatter_check, cmd_teleport, CommandOutcome};
pub use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("{}:{line}: {message}", path.display())]
    AmplitudeFile { path: PathBuf, line: usize, message: String },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Model(#[from] crate::Error),
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVARIANT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "nuclear-teleport", version, about = "Spin-1/2 teleportation through nucleon scattering")]
pub struct Cli {
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
    /// Overrides the subcommand's trial count (trials, samples per point or events).
    #[arg(long, global = true, value_name = "N")]
    pub trials: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Teleportation protocol batch, writes teleport.json.
    Teleport,
    /// Scattering-operator checks on an amplitude table, writes scatter_check.json.
    ScatterCheck {
        /// Amplitude table; falls back to scatter_check.amplitude_file in the config.
        #[arg(long, value_name = "PATH")]
        amplitudes: Option<PathBuf>,
    },
    /// Correlation probability over a tilt grid, writes bellscan.csv.
    Bellscan,
    /// Event-level experiment simulation, writes events.csv and summary.json.
    Experiment,
}

fn apply_overrides(cli: &Cli, cfg: &mut RunConfig) -> Result<(), CliError> {
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(n) = cli.trials {
        match cli.command {
            Command::Teleport => cfg.teleport.trials = n,
            Command::Bellscan => cfg.bellscan.samples_per_point = n,
            Command::Experiment => cfg.experiment.events = n,
            Command::ScatterCheck { .. } => {
                return Err(CliError::Usage("--trials does not apply to scatter-check".into()))
            }
        }
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<CommandOutcome, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    apply_overrides(cli, &mut cfg)?;
    let out = &cli.out;
    Ok(match &cli.command {
        Command::Teleport => cmd_teleport(&cfg, out)?.1,
        Command::ScatterCheck { amplitudes } => {
            let file = amplitudes
                .clone()
                .or_else(|| cfg.scatter_check.amplitude_file.clone())
                .ok_or_else(|| CliError::Usage("scatter-check needs --amplitudes or scatter_check.amplitude_file".into()))?;
            cmd_scatter_check(&file, out)?.1
        }
        Command::Bellscan => cmd_bellscan(&cfg, out)?.1,
        Command::Experiment => cmd_experiment(&cfg, out)?.1,
    })
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = match cli.threads {
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(cli)),
            Err(e) => Err(CliError::Usage(format!("cannot start {n} threads: {e}"))),
        },
        None => dispatch(cli),
    };
    match result {
        Ok(outcome) => {
            println!("{}", outcome.message);
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            if outcome.passed {
                EXIT_OK
            } else {
                eprintln!("error: invariant check failed");
                EXIT_INVARIANT
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

/// Parses `args` (including the program name) and runs them.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_OK
            }
        }
    }
}
