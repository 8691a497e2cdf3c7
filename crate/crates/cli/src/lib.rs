//! Command-line runner for the qdp-core experiments.
//!
//! Every subcommand resolves a [`config::RunConfig`], produces a table and a
//! summary, and writes them as CSV or JSON lines. The output header carries a
//! hash of the configuration so runs can be matched to their settings.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};

use config::{CommandKind, RunConfig, Settings};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Budget(qdp_core::Error),
    #[error("verification failed: {0}")]
    Verify(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Core(qdp_core::Error),
}

impl From<qdp_core::Error> for CliError {
    fn from(e: qdp_core::Error) -> Self {
        match e {
            qdp_core::Error::BudgetExceeded { .. } => CliError::Budget(e),
            e => CliError::Core(e),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

impl CliError {
    /// 1 for usage and runtime errors, 2 when a budget is exceeded, 3 when
    /// a verification fails.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) | CliError::Core(_) => 1,
            CliError::Budget(_) => 2,
            CliError::Verify(_) => 3,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "qdp", version, about = "Quantum decoding experiments over finite fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML file with default settings; flags override it
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Print the resolved configuration as TOML and exit
    #[arg(long, global = true)]
    pub print_config: bool,
    #[command(flatten)]
    pub settings: Settings,
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum Command {
    /// Easy, classical and tractable noise rates against the code rate
    Thresholds,
    /// Solve random decoding instances with a chosen measurement
    SolveQdp,
    /// Run the reduction to short codewords of the dual code
    Reduce,
    /// Closed-form pretty-good-measurement quantities of one code
    Pgm,
    /// Compare Prange's algorithm with the USD reduction
    Prange,
    /// Run the oracle cross-checks
    Verify,
    /// PGM success against noise rate
    Sweep,
}

impl From<Command> for CommandKind {
    fn from(c: Command) -> Self {
        match c {
            Command::Thresholds => CommandKind::Thresholds,
            Command::SolveQdp => CommandKind::SolveQdp,
            Command::Reduce => CommandKind::Reduce,
            Command::Pgm => CommandKind::Pgm,
            Command::Prange => CommandKind::Prange,
            Command::Verify => CommandKind::Verify,
            Command::Sweep => CommandKind::Sweep,
        }
    }
}

/// Resolves the configuration of parsed arguments.
pub fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let base = match &cli.config {
        Some(path) => Settings::from_toml_file(path)?,
        None => Settings::default(),
    };
    RunConfig::resolve(cli.command.into(), base.overlay(cli.settings.clone()))
}

/// Parses `args` and runs the command, writing results to stdout or `--out`.
pub fn run<I, T>(args: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return Ok(());
        }
        Err(e) => return Err(CliError::Usage(e.render().to_string().trim_end().to_string())),
    };
    let cfg = resolve(&cli)?;
    if cli.print_config {
        print!("{}", cfg.to_toml());
        return Ok(());
    }
    let start = Instant::now();
    let result = commands::execute(&cfg)?;
    output::write(&cfg, &result, start.elapsed().as_secs_f64())?;
    if let Some(failure) = result.failure {
        return Err(CliError::Verify(failure));
    }
    Ok(())
}
