use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::{sibling, Cli, CliError};

/// Record of one invocation, written next to its primary output. The only
/// file whose bytes change from run to run.
#[derive(Debug, Serialize)]
pub struct RunManifest<'a> {
    pub subcommand: &'static str,
    pub flags: &'a Cli,
    pub seeds: Vec<u64>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub tool_version: &'static str,
    pub started_unix_ms: u128,
    pub wall_time_ms: f64,
}

/// Clock for the manifest's timing fields.
pub struct Stopwatch {
    start: Instant,
    unix_ms: u128,
}

impl Stopwatch {
    pub fn start() -> Self {
        let unix_ms = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis());
        Self { start: Instant::now(), unix_ms }
    }
}

pub fn write_manifest(
    primary: &Path,
    cli: &Cli,
    subcommand: &'static str,
    seeds: Vec<u64>,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    clock: &Stopwatch,
) -> Result<PathBuf, CliError> {
    let m = RunManifest {
        subcommand,
        flags: cli,
        seeds,
        inputs,
        outputs,
        tool_version: env!("CARGO_PKG_VERSION"),
        started_unix_ms: clock.unix_ms,
        wall_time_ms: clock.start.elapsed().as_secs_f64() * 1e3,
    };
    let path = sibling(primary, "manifest.json");
    let text = serde_json::to_string_pretty(&m).map_err(|e| CliError::Internal(e.to_string()))?;
    std::fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}
