//! `twinguide` — command-line pipeline for twin optical bend sensors:
//! scene tracing, pattern sweeps, calibration fitting and digital-shadow
//! replay, with reproducible run configuration.

mod commands;
mod config;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sha2::{Digest, Sha256};

#[derive(Parser)]
#[command(
    name = "twinguide",
    version,
    about = "Co-design and monitoring toolkit for twin optical bend sensors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Trace a ray fan through one deformation state or a scene file.
    Trace(commands::trace::TraceArgs),
    /// Sweep the cavity-pattern grid and rank designs by the figure of merit.
    Sweep(commands::sweep::SweepArgs),
    /// Fit per-sensor calibration models and quality metrics from cycle data.
    Calibrate(commands::calibrate::CalibrateArgs),
    /// Replay a sensor stream through the digital shadow.
    Shadow(commands::shadow::ShadowArgs),
    /// Generate a synthetic deformation-state library.
    SynthStates(commands::synth::SynthArgs),
}

/// Command errors carrying the exit-code contract: 2 for validation
/// failures (bad flags, missing or malformed inputs), 3 for runtime
/// failures.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Runtime(String),
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    pub fn runtime(msg: impl Into<String>) -> Self {
        CliError::Runtime(msg.into())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "{m}"),
            CliError::Runtime(m) => write!(f, "{m}"),
        }
    }
}

/// Input-phase failures are validation errors.
pub fn input_err(e: impl fmt::Display) -> CliError {
    CliError::Validation(e.to_string())
}

/// Execution-phase failures are runtime errors.
pub fn run_err(e: impl fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

pub fn ensure_out_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path)
        .map_err(|e| CliError::validation(format!("cannot create {}: {e}", path.display())))
}

pub fn read_input(path: &PathBuf) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))
}

pub fn write_output(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))
}

/// SHA-256 of a file, for provenance sidecars.
pub fn file_sha256(path: &PathBuf) -> Result<String, CliError> {
    let bytes = fs::read(path)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Trace(args) => commands::trace::run(args),
        Command::Sweep(args) => commands::sweep::run(args),
        Command::Calibrate(args) => commands::calibrate::run(args),
        Command::Shadow(args) => commands::shadow::run(args),
        Command::SynthStates(args) => commands::synth::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
