use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "hodge", version, about = "First-homology generators of simplicial 2-complexes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Sample a random geometric flag complex and write it as .sc
    Gen(GenArgs),
    /// Compute a homology generating set
    Run(RunArgs),
    /// Print the exact first Betti number
    Oracle(OracleArgs),
    /// Check a result file against the exact oracle
    Verify(VerifyArgs),
    /// Parameter sweeps written as CSV
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

#[derive(Debug, Args, Serialize)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 6.0)]
    pub avg_degree: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Centralized,
    Distributed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchedulingArg {
    Sync,
    Async,
}

/// `max-id` or a vertex number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RootArg {
    MaxId,
    Id(usize),
}

impl FromStr for RootArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "max-id" {
            return Ok(RootArg::MaxId);
        }
        s.parse().map(RootArg::Id).map_err(|_| format!("expected max-id or a vertex id, got {s:?}"))
    }
}

#[derive(Debug, Args, Serialize)]
pub struct RunArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Centralized)]
    pub mode: Mode,
    #[arg(long, default_value_t = 1e-6)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub label_tol: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub pivot_tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "max-id")]
    pub root: RootArg,
    #[arg(long, value_enum, default_value_t = SchedulingArg::Sync)]
    pub scheduling: SchedulingArg,
    /// Largest link delay under async scheduling
    #[arg(long, default_value_t = 4)]
    pub delay_spread: u64,
    /// Step size; defaults to 1/||L1||_1
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Result JSON; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct OracleArgs {
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub result: PathBuf,
}

/// `a:b:s`, `a:b` (step 1) or a single value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Range {
    pub start: usize,
    pub end: usize,
    pub step: usize,
}

impl Range {
    pub fn values(&self) -> Vec<usize> {
        (self.start..=self.end).step_by(self.step).collect()
    }
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| p.trim().parse::<usize>().map_err(|_| format!("bad number {p:?} in range {s:?}"));
        let (start, end, step) = match parts.as_slice() {
            [a] => (num(a)?, num(a)?, 1),
            [a, b] => (num(a)?, num(b)?, 1),
            [a, b, c] => (num(a)?, num(b)?, num(c)?),
            _ => return Err(format!("range {s:?} is not a:b:s")),
        };
        if step == 0 || start > end {
            return Err(format!("empty range {s:?}"));
        }
        Ok(Range { start, end, step })
    }
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentCommand {
    /// |P| - b1 over a range of sizes
    ExcessCycles(SweepArgs),
    /// Iterations against required digits on one complex
    Iterations(DigitsArgs),
    /// Iterations of the first harmonic over a range of sizes
    IterationsVsN(SweepArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long, default_value = "100:600:100")]
    pub n_range: Range,
    #[arg(long, default_value_t = 6.0)]
    pub avg_degree: f64,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    /// Decimal digits of the stopping tolerance
    #[arg(long, default_value_t = 6)]
    pub digits: usize,
    #[arg(long, default_value_t = 0)]
    pub seed_base: u64,
    /// Also run the simulated protocol to fill messages_total
    #[arg(long, value_enum, default_value_t = Mode::Centralized)]
    pub mode: Mode,
    /// CSV file; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DigitsArgs {
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    #[arg(long, default_value_t = 6.0)]
    pub avg_degree: f64,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value = "2:8")]
    pub digits: Range,
    #[arg(long, default_value_t = 0)]
    pub seed_base: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
