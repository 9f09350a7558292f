//! `covtest`: simulate masked Gaussian samples, compute the test statistics,
//! run fixed and adaptive tests, and drive Monte Carlo sweeps.

mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use covtest_core::Error;

#[derive(Parser, Debug)]
#[command(name = "covtest", version, about = "Identity tests for covariance matrices from masked Gaussian data")]
struct Cli {
    /// Config file with flat `key = value` lines and `[command]` sections.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed; overrides `seed` from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for Monte Carlo commands. Results do not depend on it.
    #[arg(long, global = true, env = "COVTEST_THREADS")]
    threads: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Draw a masked sample (CSV, empty field = unobserved).
    Simulate,
    /// Compute a statistic on a stored sample.
    Stat,
    /// Fixed-bandwidth test on a stored sample.
    Test,
    /// Adaptive test on a stored sample.
    Adapt,
    /// Monte Carlo error table or rate sweep.
    Sweep,
    /// Lower-bound power probe.
    Probe,
    /// Oracle and null-moment checks.
    Selftest,
}

impl Command {
    fn section(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Stat => "stat",
            Command::Test => "test",
            Command::Adapt => "adapt",
            Command::Sweep => "sweep",
            Command::Probe => "probe",
            Command::Selftest => "selftest",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Jsonl,
}

/// A failure with its exit code and the field it concerns.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub field: String,
    pub message: String,
}

impl CliError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            code: 2,
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn io(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            code: 4,
            field: field.into(),
            message: message.into(),
        }
    }

    fn kind(&self) -> &'static str {
        match self.code {
            2 => "config",
            3 => "numerical",
            4 => "io",
            _ => "failure",
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error[{}] {}: {}", self.kind(), self.field, self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let (code, field) = match &e {
            Error::InvalidParameter { name, .. } => (2, *name),
            Error::ThresholdConstant { .. } => (2, "c"),
            Error::Parse(_) | Error::Io(_) => (4, "input"),
            Error::PhiTooLarge { .. } => (3, "phi"),
            Error::BandwidthExceedsDimension { .. } => (3, "m"),
            Error::GridExceedsDimension { .. } => (3, "alpha_star"),
            Error::EmptyGrid { .. } => (3, "alpha_star_np"),
            Error::DimensionMismatch { .. } => (3, "p"),
            Error::NotSquare { .. }
            | Error::NotSymmetric { .. }
            | Error::NonUnitDiagonal { .. }
            | Error::NotPositiveDefinite { .. }
            | Error::NotToeplitz { .. } => (3, "model"),
        };
        Self {
            code,
            field: field.to_string(),
            message: e.to_string(),
        }
    }
}

/// Global options passed to every command.
pub struct Options {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub format: Format,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let params = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io("config", format!("{}: {e}", path.display())))?;
            config::Params::parse(&text, cli.command.section())?
        }
        None => config::Params::empty(),
    };
    let opts = Options {
        seed: cli.seed,
        threads: cli.threads,
        format: cli.format,
    };
    let output = match cli.command {
        Command::Simulate => commands::simulate(&params, &opts)?,
        Command::Stat => commands::stat(&params, &opts)?,
        Command::Test => commands::test(&params, &opts)?,
        Command::Adapt => commands::adapt(&params, &opts)?,
        Command::Sweep => commands::sweep(&params, &opts)?,
        Command::Probe => commands::probe(&params, &opts)?,
        Command::Selftest => commands::selftest(&params, &opts)?,
    };
    match &cli.out {
        Some(path) => std::fs::write(path, &output.text).map_err(|e| CliError::io("out", format!("{}: {e}", path.display())))?,
        None => print!("{}", output.text),
    }
    if output.failed {
        return Err(CliError {
            code: 3,
            field: "selftest".into(),
            message: "one or more checks failed".into(),
        });
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code)
        }
    }
}
