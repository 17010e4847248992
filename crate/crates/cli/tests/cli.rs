use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use homology_core::complex::{build_boundaries, fixtures, to_sc_string, SimplicialComplex2};
use homology_core::cyclebasis::ResultJson;
use homology_core::oracle::HomologyOracle;
use serde_json::Value;
use tempfile::TempDir;

fn hodge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hodge")).args(args).env_remove("HODGE_LOG").output().expect("spawn hodge")
}

fn write_sc(dir: &Path, name: &str, k: &SimplicialComplex2) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, to_sc_string(k)).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn run_json(input: &Path, extra: &[&str]) -> ResultJson {
    let mut args = vec!["run", "--input", s(input)];
    args.extend_from_slice(extra);
    let o = hodge(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn gen_two_nodes_gives_one_edge() {
    let o = hodge(&["gen", "--n", "2", "--avg-degree", "100", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "v 2\ne 0 1\n");
}

#[test]
fn gen_repeats_byte_for_byte() {
    let d = TempDir::new().unwrap();
    let (a, b) = (d.path().join("a.sc"), d.path().join("b.sc"));
    for p in [&a, &b] {
        let o = hodge(&["gen", "--n", "80", "--avg-degree", "6", "--seed", "9", "--out", s(p)]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let m: Value = serde_json::from_slice(&std::fs::read(d.path().join("a.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["subcommand"], "gen");
    assert_eq!(m["seeds"][0], 9);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(hodge(&["gen", "--n", "0"]).status.code(), Some(64));
    assert_eq!(hodge(&["run", "--input", "/nonexistent/x.sc"]).status.code(), Some(64));
    assert_eq!(hodge(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(hodge(&["--help"]).status.code(), Some(0));
}

#[test]
fn too_sparse_exits_2() {
    let o = hodge(&["gen", "--n", "2", "--avg-degree", "1e-9", "--seed", "0"]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn iteration_cap_exits_3() {
    let d = TempDir::new().unwrap();
    let f = write_sc(d.path(), "ring.sc", &fixtures::ring(12));
    let o = hodge(&["run", "--input", s(&f), "--max-iters", "3"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn filled_triangle_has_no_cycles() {
    let d = TempDir::new().unwrap();
    let f = write_sc(d.path(), "filled.sc", &fixtures::filled_triangle());
    let r = run_json(&f, &[]);
    assert_eq!(r.betti1_estimate, 0);
    assert!(r.cycles.is_empty());
}

#[test]
fn hollow_triangle_has_one_cycle() {
    let d = TempDir::new().unwrap();
    let f = write_sc(d.path(), "hollow.sc", &fixtures::hollow_triangle());
    for mode in ["centralized", "distributed"] {
        let r = run_json(&f, &["--mode", mode]);
        assert_eq!(r.betti1_estimate, 1);
        let mut edges = r.cycles[0].edges.clone();
        edges.sort();
        assert_eq!(edges, vec![[0, 1], [0, 2], [1, 2]]);
    }
}

#[test]
fn modes_agree_classwise() {
    let d = TempDir::new().unwrap();
    let f = d.path().join("g.sc");
    assert_eq!(hodge(&["gen", "--n", "60", "--seed", "4", "--out", s(&f)]).status.code(), Some(0));
    let k = homology_core::complex::read_sc(&f).unwrap();
    let c = run_json(&f, &["--seed", "3"]);
    let o = HomologyOracle::new(&build_boundaries(&k));
    let cc = c.to_chains(&k).unwrap();
    for sched in ["sync", "async"] {
        let r = run_json(&f, &["--seed", "3", "--mode", "distributed", "--scheduling", sched]);
        assert_eq!(r.betti1_estimate, c.betti1_estimate);
        for x in r.to_chains(&k).unwrap() {
            assert_eq!(cc.iter().filter(|y| o.are_homologous(&x, y).unwrap()).count(), 1);
        }
    }
}

#[test]
fn distributed_run_writes_cost_and_transcript() {
    let d = TempDir::new().unwrap();
    let f = write_sc(d.path(), "ring.sc", &fixtures::ring(6));
    let out = d.path().join("r.json");
    let o = Command::new(env!("CARGO_BIN_EXE_hodge"))
        .args(["run", "--input", s(&f), "--mode", "distributed", "--out", s(&out)])
        .env("HODGE_LOG", "info")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let cost = std::fs::read_to_string(d.path().join("r.cost.csv")).unwrap();
    assert!(cost.starts_with("phase,node_id,broadcasts,packets_received,payload_floats\n"));
    let t = std::fs::read_to_string(d.path().join("r.transcript.txt")).unwrap();
    assert!(t.lines().all(|l| l.starts_with("t=")));
    assert!(d.path().join("r.manifest.json").exists());
}

#[test]
fn verify_accepts_good_and_rejects_duplicates() {
    let d = TempDir::new().unwrap();
    let f = write_sc(d.path(), "fig8.sc", &fixtures::figure_eight());
    let good = d.path().join("good.json");
    assert_eq!(hodge(&["run", "--input", s(&f), "--out", s(&good)]).status.code(), Some(0));
    assert_eq!(hodge(&["verify", "--input", s(&f), "--result", s(&good)]).status.code(), Some(0));

    let mut r: ResultJson = serde_json::from_slice(&std::fs::read(&good).unwrap()).unwrap();
    r.cycles[1] = r.cycles[0].clone();
    let bad = d.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(hodge(&["verify", "--input", s(&f), "--result", s(&bad)]).status.code(), Some(1));
}

#[test]
fn oracle_counts_figure_eight_holes() {
    let d = TempDir::new().unwrap();
    let f = write_sc(d.path(), "fig8.sc", &fixtures::figure_eight());
    let o = hodge(&["oracle", "--input", s(&f)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8(o.stdout).unwrap().trim(), "2");
}

fn csv_rows(bytes: &[u8]) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(bytes).records().map(|r| r.unwrap()).collect()
}

#[test]
fn single_point_sweep_has_one_row() {
    let o = hodge(&["experiment", "excess-cycles", "--n-range", "40", "--trials", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&o.stdout);
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][0], "40");
}

#[test]
fn iterations_increase_with_digits() {
    let o = hodge(&["experiment", "iterations", "--n", "60", "--trials", "3", "--digits", "2:8"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&o.stdout);
    assert_eq!(rows.len(), 21);
    for trial in rows.chunks(7) {
        let its: Vec<usize> = trial.iter().map(|r| r[5].parse().unwrap()).collect();
        assert!(its.windows(2).all(|w| w[0] < w[1]), "{its:?}");
    }
}

#[test]
fn dense_complexes_have_no_excess() {
    // at this density the unit square is covered with no holes
    let o = hodge(&["experiment", "excess-cycles", "--n-range", "30", "--avg-degree", "40", "--trials", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&o.stdout);
    assert_eq!(rows.len(), 3);
    for r in &rows {
        assert_eq!(&r[2], "0", "{r:?}");
        assert_eq!(&r[4], "0", "{r:?}");
    }
}

#[test]
fn experiments_repeat_byte_for_byte() {
    let args = ["experiment", "iterations-vs-n", "--n-range", "30:50:20", "--trials", "2", "--seed-base", "5"];
    assert_eq!(hodge(&args).stdout, hodge(&args).stdout);
}
