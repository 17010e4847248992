//! Sweeps behind the excess-cycle and convergence plots. Every trial draws
//! its own seed from `(seed_base, n, trial)`, trials run in parallel and
//! rows come out in trial order. A failing trial still yields a row, with
//! the reason in `error`.

use std::path::PathBuf;

use homology_core::complex::{build_boundaries, build_laplacian_algebraic};
use homology_core::cyclebasis::{candidate_set, spanning_tree_bfs, PipelineConfig};
use homology_core::geomgraph::{generate, GeomConfig};
use homology_core::harmonic::{iterations_per_tolerance, HarmonicConfig};
use homology_core::netsim::{run_full_pipeline, SimConfig};
use homology_core::oracle::HomologyOracle;
use homology_core::rng::derive_seed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::args::{DigitsArgs, ExperimentCommand, Mode, SweepArgs};
use crate::commands::emit;
use crate::manifest::{write_manifest, Stopwatch};
use crate::{Cli, CliError};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub n: usize,
    pub seed: u64,
    pub b1: Option<usize>,
    #[serde(rename = "card_P")]
    pub card_p: Option<usize>,
    pub excess: Option<i64>,
    pub iterations: Option<usize>,
    pub messages_total: Option<u64>,
    pub digits: usize,
    pub error: String,
}

pub fn epsilon_for(digits: usize) -> f64 {
    10f64.powi(-(digits as i32))
}

/// Seed of trial `trial` at size `n`; also the seed to pass to `gen`.
pub fn trial_seed(seed_base: u64, n: usize, trial: usize) -> u64 {
    derive_seed(seed_base, ((n as u64) << 32) | trial as u64)
}

/// One complex: exact `b1`, then `|P|` and the first harmonic's iteration
/// count, from the centralized candidate stage or the full simulated run.
pub fn sweep_trial(n: usize, avg_degree: f64, seed: u64, digits: usize, mode: Mode) -> Row {
    let mut row = Row { n, seed, digits, ..Row::default() };
    let k = match generate(&GeomConfig::new(n, avg_degree, seed)) {
        Ok(k) => k,
        Err(e) => {
            row.error = e.to_string();
            return row;
        }
    };
    let b = build_boundaries(&k);
    let b1 = HomologyOracle::new(&b).betti1();
    row.b1 = Some(b1);
    let mut cfg = PipelineConfig::with_seed(seed);
    cfg.harmonic.epsilon = epsilon_for(digits);
    let got = match mode {
        Mode::Centralized => {
            let l = build_laplacian_algebraic(&b);
            spanning_tree_bfs(&k, k.vertex_count() - 1)
                .and_then(|t| candidate_set(&k, &l, &t, &cfg))
                .map(|c| (c.p.len(), c.harmonics[0].iterations, None))
                .map_err(|e| e.to_string())
        }
        Mode::Distributed => run_full_pipeline(&k, &cfg, &SimConfig::default())
            .map(|d| (d.generators.p.len(), d.harmonics[0].iterations, Some(d.cost.messages_total())))
            .map_err(|e| e.to_string()),
    };
    match got {
        Ok((p, its, msgs)) => {
            row.card_p = Some(p);
            row.excess = Some(p as i64 - b1 as i64);
            row.iterations = Some(its);
            row.messages_total = msgs;
        }
        Err(e) => row.error = e,
    }
    row
}

pub fn sweep(a: &SweepArgs) -> Vec<Row> {
    let specs: Vec<(usize, usize)> =
        a.n_range.values().into_iter().flat_map(|n| (0..a.trials).map(move |t| (n, t))).collect();
    specs
        .par_iter()
        .map(|&(n, t)| sweep_trial(n, a.avg_degree, trial_seed(a.seed_base, n, t), a.digits, a.mode))
        .collect()
}

/// Iterations against digits on the complex of `seed_base`; trial `t`
/// varies only the harmonic's start vector.
pub fn digits_sweep(a: &DigitsArgs) -> Result<Vec<Row>, CliError> {
    let k = generate(&GeomConfig::new(a.n, a.avg_degree, a.seed_base))?;
    let b = build_boundaries(&k);
    let b1 = HomologyOracle::new(&b).betti1();
    let l = build_laplacian_algebraic(&b);
    let digits = a.digits.values();
    let eps: Vec<f64> = digits.iter().map(|&d| epsilon_for(d)).collect();
    let per_trial: Vec<Vec<Row>> = (0..a.trials)
        .into_par_iter()
        .map(|t| {
            let seed = derive_seed(a.seed_base, t as u64);
            let base = Row { n: a.n, seed, b1: Some(b1), ..Row::default() };
            match iterations_per_tolerance(&l, &HarmonicConfig::with_seed(seed), &eps) {
                Ok(its) => digits
                    .iter()
                    .zip(its)
                    .map(|(&d, i)| Row { digits: d, iterations: Some(i), ..base.clone() })
                    .collect(),
                Err(e) => digits.iter().map(|&d| Row { digits: d, error: e.to_string(), ..base.clone() }).collect(),
            }
        })
        .collect();
    Ok(per_trial.into_iter().flatten().collect())
}

pub fn to_csv(rows: &[Row]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(["n", "seed", "b1", "card_P", "excess", "iterations", "messages_total", "digits", "error"])
            .map_err(|e| CliError::Internal(e.to_string()))?;
    }
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Internal(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
}

pub fn dispatch(cli: &Cli, e: &ExperimentCommand, clock: &Stopwatch) -> Result<(), CliError> {
    let (rows, out, name): (Vec<Row>, &Option<PathBuf>, &'static str) = match e {
        ExperimentCommand::ExcessCycles(a) => (sweep(a), &a.out, "experiment excess-cycles"),
        ExperimentCommand::IterationsVsN(a) => (sweep(a), &a.out, "experiment iterations-vs-n"),
        ExperimentCommand::Iterations(a) => (digits_sweep(a)?, &a.out, "experiment iterations"),
    };
    emit(out.as_deref(), &to_csv(&rows)?)?;
    if let Some(o) = out {
        let mut seeds: Vec<u64> = rows.iter().map(|r| r.seed).collect();
        seeds.dedup();
        write_manifest(o, cli, name, seeds, vec![], vec![o.clone()], clock)?;
    }
    Ok(())
}
