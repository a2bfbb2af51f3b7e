//! Command-line front end: experiment configs, CSV and SVG output, oracle and
//! bound queries.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 runtime error.

pub mod commands;
pub mod config;
pub mod output;
pub mod run;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::commands::BoundCmd;
use crate::config::{ConfigError, FieldError, PopulationRef};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Simulation(#[from] iab::simulator::SimError),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn config(path: &str, reason: impl Into<String>) -> Self {
        CliError::Config(ConfigError(vec![FieldError { path: path.to_string(), reason: reason.into() }]))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 1,
            CliError::Io { .. } | CliError::Simulation(_) | CliError::Runtime(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "iab", about = "Instrument-armed bandit simulations", disable_version_flag = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every policy in a config and write CSV and SVG output
    Run { config: PathBuf },
    /// Print the ground truth of a builtin or file population as JSON
    Oracle { population: String },
    /// Evaluate a bound and print it as JSON
    Bounds {
        #[command(subcommand)]
        which: BoundCmd,
    },
    /// Print the version
    Version,
}

/// Sets the simulator's thread count from `IAB_THREADS`, if present.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("IAB_THREADS") else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::Usage(format!("IAB_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) -> Result<(), CliError> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}").and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
            Err(CliError::Io { path: PathBuf::from("<stdout>"), source: e })
        }
        _ => Ok(()),
    }
}

/// Executes a parsed command, writing results to stdout.
pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| CliError::config("$", format!("cannot read {}: {e}", config.display())))?;
            let cfg = config::parse_config(&text)?;
            let report = run::run(&cfg)?;
            let listing: Vec<String> = report.files.iter().map(|f| f.display().to_string()).collect();
            emit(&listing.join("\n"))?;
        }
        Command::Oracle { population } => {
            let pop = run::load_population(&PopulationRef::parse(&population))?;
            let v = commands::oracle_json(&pop)?;
            emit(&serde_json::to_string_pretty(&v).expect("json"))?;
        }
        Command::Bounds { which } => {
            let v = commands::bounds_json(&which)?;
            emit(&serde_json::to_string_pretty(&v).expect("json"))?;
        }
        Command::Version => emit(&format!("iab {}", env!("CARGO_PKG_VERSION")))?,
    }
    Ok(())
}
