use std::io::Write;
use std::path::{Path, PathBuf};

use homology_core::complex::{build_boundaries, read_sc, to_sc_string, SimplicialComplex2};
use homology_core::cyclebasis::{run_centralized, PipelineConfig, ResultJson, RootChoice};
use homology_core::geomgraph::{generate, GeomConfig};
use homology_core::harmonic::HarmonicConfig;
use homology_core::netsim::{run_full_pipeline, Scheduling, SimConfig, TranscriptLevel};
use homology_core::oracle::HomologyOracle;
use log::info;

use crate::args::{GenArgs, Mode, OracleArgs, RootArg, RunArgs, SchedulingArg, VerifyArgs};
use crate::experiment;
use crate::manifest::{write_manifest, Stopwatch};
use crate::{sibling, Cli, CliError, Command};

pub fn dispatch(cli: &Cli) -> Result<(), CliError> {
    let clock = Stopwatch::start();
    match &cli.command {
        Command::Gen(a) => gen(cli, a, &clock),
        Command::Run(a) => run(cli, a, &clock),
        Command::Oracle(a) => oracle(a),
        Command::Verify(a) => verify(a),
        Command::Experiment(e) => experiment::dispatch(cli, e, &clock),
    }
}

/// Writes `text` to `path`, or to stdout when there is no path.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::io(p, e))?;
            info!("wrote {}", p.display());
            Ok(())
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError::Internal(e.to_string()))
        }
    }
}

pub fn load_complex(path: &Path) -> Result<SimplicialComplex2, CliError> {
    read_sc(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn gen(cli: &Cli, a: &GenArgs, clock: &Stopwatch) -> Result<(), CliError> {
    let k = generate(&GeomConfig::new(a.n, a.avg_degree, a.seed))?;
    emit(a.out.as_deref(), &to_sc_string(&k))?;
    if let Some(out) = &a.out {
        write_manifest(out, cli, "gen", vec![a.seed], vec![], vec![out.clone()], clock)?;
    }
    Ok(())
}

pub fn pipeline_config(a: &RunArgs) -> PipelineConfig {
    PipelineConfig {
        harmonic: HarmonicConfig { epsilon: a.epsilon, delta: a.delta, max_iterations: a.max_iters, seed: a.seed },
        label_tol: a.label_tol,
        pivot_tol: a.pivot_tol,
        root: match a.root {
            RootArg::MaxId => RootChoice::MaxId,
            RootArg::Id(v) => RootChoice::Vertex(v),
        },
        ..PipelineConfig::default()
    }
}

/// Transcript verbosity from `HODGE_LOG`.
pub fn transcript_level() -> TranscriptLevel {
    match std::env::var("HODGE_LOG").as_deref().map(str::trim) {
        Ok("debug") => TranscriptLevel::Debug,
        Ok("info") => TranscriptLevel::Info,
        _ => TranscriptLevel::Off,
    }
}

fn result_text(r: &ResultJson) -> Result<String, CliError> {
    serde_json::to_string_pretty(r).map(|s| s + "\n").map_err(|e| CliError::Internal(e.to_string()))
}

fn run(cli: &Cli, a: &RunArgs, clock: &Stopwatch) -> Result<(), CliError> {
    let k = load_complex(&a.input)?;
    let cfg = pipeline_config(a);
    let out = a.out.as_deref();
    let mut outputs: Vec<PathBuf> = out.map(Path::to_path_buf).into_iter().collect();
    match a.mode {
        Mode::Centralized => {
            let res = run_centralized(&k, &cfg)?;
            emit(out, &result_text(&res.to_result_json(&k))?)?;
        }
        Mode::Distributed => {
            let scheduling = match a.scheduling {
                SchedulingArg::Sync => Scheduling::Synchronous,
                SchedulingArg::Async => Scheduling::Async { seed: a.seed, delay_spread: a.delay_spread },
            };
            let sim = SimConfig { scheduling, transcript: transcript_level(), ..SimConfig::default() };
            let res = run_full_pipeline(&k, &cfg, &sim)?;
            emit(out, &result_text(&res.to_result_json(&k))?)?;
            match out {
                Some(o) => {
                    let cost = sibling(o, "cost.csv");
                    emit(Some(&cost), &res.cost.to_csv())?;
                    outputs.push(cost);
                    if !res.transcript.is_empty() {
                        let t = sibling(o, "transcript.txt");
                        emit(Some(&t), &(res.transcript.join("\n") + "\n"))?;
                        outputs.push(t);
                    }
                }
                None => {
                    for line in &res.transcript {
                        eprintln!("{line}");
                    }
                }
            }
        }
    }
    if let Some(o) = out {
        write_manifest(o, cli, "run", vec![a.seed], vec![a.input.clone()], outputs, clock)?;
    }
    Ok(())
}

fn oracle(a: &OracleArgs) -> Result<(), CliError> {
    let k = load_complex(&a.input)?;
    let o = HomologyOracle::new(&build_boundaries(&k));
    emit(None, &format!("{}\n", o.betti1()))
}

/// Why `r` is not a homology generating set of `k`, if it is not.
pub fn verify_result(k: &SimplicialComplex2, r: &ResultJson) -> Result<(), String> {
    if r.betti1_estimate != r.cycles.len() {
        return Err(format!("betti1_estimate {} but {} cycles", r.betti1_estimate, r.cycles.len()));
    }
    let chains = r.to_chains(k).map_err(|e| e.to_string())?;
    let o = HomologyOracle::new(&build_boundaries(k));
    let b1 = o.betti1();
    if chains.len() != b1 {
        return Err(format!("{} cycles but b1 = {b1}", chains.len()));
    }
    match o.verify_generating_set(&chains) {
        Ok(true) => Ok(()),
        Ok(false) => Err("cycles are dependent modulo boundaries".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn verify(a: &VerifyArgs) -> Result<(), CliError> {
    let k = load_complex(&a.input)?;
    let text = std::fs::read_to_string(&a.result).map_err(|e| CliError::Usage(format!("{}: {e}", a.result.display())))?;
    let r: ResultJson =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", a.result.display())))?;
    verify_result(&k, &r).map_err(CliError::Verify)?;
    emit(None, &format!("ok: {} generators, b1 = {}\n", r.cycles.len(), r.cycles.len()))
}
