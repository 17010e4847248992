//! The `hodge` command line: complex generation, both pipelines, oracle
//! checks and the experiment sweeps.

pub mod args;
pub mod commands;
pub mod experiment;
pub mod manifest;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::Parser;
use homology_core::cyclebasis::CycleBasisError;
use homology_core::geomgraph::GeomError;
use homology_core::harmonic::HarmonicError;
use homology_core::netsim::NetsimError;
use thiserror::Error;

pub use args::{Cli, Command};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_GENERATION: i32 = 2;
pub const EXIT_CONVERGENCE: i32 = 3;
pub const EXIT_RANK: i32 = 4;
pub const EXIT_USAGE: i32 = 64;
/// Anything the contract above has no code for (protocol faults, I/O).
pub const EXIT_INTERNAL: i32 = 70;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    Verify(String),
    #[error("generation failed: {0}")]
    Generation(GeomError),
    #[error("{0}")]
    Convergence(String),
    #[error("{0}; try another --seed")]
    Rank(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Verify(_) => EXIT_VERIFY,
            CliError::Generation(_) => EXIT_GENERATION,
            CliError::Convergence(_) => EXIT_CONVERGENCE,
            CliError::Rank(_) => EXIT_RANK,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Internal(format!("{}: {e}", path.display()))
    }
}

impl From<GeomError> for CliError {
    fn from(e: GeomError) -> Self {
        match e {
            GeomError::InvalidConfig(m) => CliError::Usage(m),
            other => CliError::Generation(other),
        }
    }
}

impl From<HarmonicError> for CliError {
    fn from(e: HarmonicError) -> Self {
        match e {
            HarmonicError::InvalidConfig(m) => CliError::Usage(m),
            e @ (HarmonicError::MaxIterationsExceeded { .. } | HarmonicError::Diverged { .. }) => {
                CliError::Convergence(e.to_string())
            }
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<CycleBasisError> for CliError {
    fn from(e: CycleBasisError) -> Self {
        match e {
            CycleBasisError::Harmonic(h) => h.into(),
            e @ CycleBasisError::RankDeficientHarmonics { .. } => CliError::Rank(e.to_string()),
            e @ (CycleBasisError::InvalidConfig(_) | CycleBasisError::InvalidRoot { .. }) => CliError::Usage(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<NetsimError> for CliError {
    fn from(e: NetsimError) -> Self {
        match e {
            NetsimError::Harmonic(h) => h.into(),
            NetsimError::CycleBasis(c) => c.into(),
            NetsimError::InvalidConfig(m) => CliError::Usage(m),
            other => CliError::Internal(other.to_string()),
        }
    }
}

/// `dir/name.json` -> `dir/name.<suffix>`.
pub fn sibling(out: &Path, suffix: &str) -> PathBuf {
    out.with_extension(suffix)
}

/// Parses `argv` and runs it; returns the process exit code. Errors go to
/// stderr.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match commands::dispatch(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("hodge: {e}");
            e.exit_code()
        }
    }
}
