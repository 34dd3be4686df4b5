//! `spiderweb`: reproducible runs driven by one TOML config.
//!
//! Exit codes: 0 verified or complete, 2 falsified or invalid input,
//! 3 indeterminate or precision lost, 1 internal error.

mod commands;
mod config;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("falsified: {0}")]
    Falsified(String),
    #[error("indeterminate: {0}")]
    Indeterminate(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Invalid(_) | CliError::Falsified(_) => 2,
            CliError::Indeterminate(_) => 3,
            CliError::Internal(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(name = "spiderweb", version, about = "Certified growth, certificate and construction runs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the zero-placement construction.
    Construct(Io),
    /// Build a spider's web certificate, or check one.
    Certify(Io),
    /// Tabulate log R_n and eps_n.
    Eps(Io),
    /// Classify points on the negative axis by escape speed.
    Classify(Io),
    /// Re-check a construction file.
    Verify(Io),
}

#[derive(clap::Args)]
struct Io {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, io) = match &cli.command {
        Command::Construct(io) => ("construct", io),
        Command::Certify(io) => ("certify", io),
        Command::Eps(io) => ("eps", io),
        Command::Classify(io) => ("classify", io),
        Command::Verify(io) => ("verify", io),
    };
    let run = || -> Result<(), CliError> {
        let cfg = config::RunConfig::load(&io.config)?;
        std::fs::create_dir_all(&io.out).map_err(|e| CliError::Internal(format!("{}: {e}", io.out.display())))?;
        match name {
            "construct" => commands::construct(&cfg, &io.out),
            "certify" => commands::certify(&cfg, &io.out),
            "eps" => commands::eps(&cfg, &io.out),
            "classify" => commands::classify(&cfg, &io.out),
            _ => commands::verify(&cfg, &io.out),
        }
    };
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("spiderweb {name}: {e}");
            ExitCode::from(e.code())
        }
    }
}
