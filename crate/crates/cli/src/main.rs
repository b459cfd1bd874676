use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod validate;

use config::RunConfig;
use validate::Suite;

/// Exit 1 is reserved for a validation suite that ran and failed; anything
/// the user can fix in the inputs exits 2.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Failed(String),
}

impl From<rindler_core::Error> for CliError {
    fn from(e: rindler_core::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

/// One line of machine-readable output; file notices go to stderr. A closed
/// pipe (e.g. `| head`) is not an error.
pub fn emit(line: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{line}");
}

#[derive(Parser)]
#[command(name = "rindler-probe", version, about = "Spectra, simulations and obstacle localization for accelerated observers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON run configuration; defaults apply to omitted sections.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides estimator.seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides output.directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic Wigner tables: free spectrum, and with a scene the deformed spectrum and R.
    Spectrum {
        #[command(flatten)]
        common: Common,
    },
    /// Monte-Carlo estimate of the windowed local spectrum.
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Fit the mirror pose to an R grid, or a wall distance to a stationary spectrum.
    Localize {
        /// R grid CSV, or with --stationary a two-column omega,W CSV.
        input: PathBuf,
        /// Standard-error grid for inverse-variance weights (default: INPUT with _stderr).
        #[arg(long)]
        stderr: Option<PathBuf>,
        #[arg(long)]
        stationary: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Run an acceptance suite; prints a table to stderr and JSON to stdout.
    Validate {
        #[arg(long, value_enum)]
        suite: Suite,
        #[command(flatten)]
        common: Common,
    },
}

fn load(common: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.estimator.seed = s;
    }
    if let Some(o) = &common.out {
        cfg.output.directory = o.clone();
    }
    Ok(cfg)
}

fn set_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("RINDLER_PROBE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("RINDLER_PROBE_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    set_threads()?;
    match cli.command {
        Command::Spectrum { common } => commands::spectrum(&load(&common)?),
        Command::Simulate { common } => commands::simulate(&load(&common)?),
        Command::Localize { input, stderr, stationary, common } => {
            commands::localize(&load(&common)?, &input, stderr.as_deref(), stationary)
        }
        Command::Validate { suite, common } => validate::run(suite, &load(&common)?, common.out.is_some()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Failed(msg)) => {
            eprintln!("validation failed: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
