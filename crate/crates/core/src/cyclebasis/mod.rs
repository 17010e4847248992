//! Centralized homology generators from a spanning-tree cycle basis.
//!
//! Every non-tree edge closes one tree cycle. Integrating a random harmonic
//! over each cycle tells contractible cycles (integral zero) from the rest,
//! and equal absolute integrals mark homologous cycles. One short
//! representative per class forms `P`; integrating `|P|` independent
//! harmonics over `P` and column-reducing the result leaves `H`.

mod cycles;
mod reduce;
mod report;
mod select;
mod tree;

use thiserror::Error;

pub use cycles::{
    build_cycle_records, cycle_from_nontree_edge, cycle_integral, downward_term, edge_cycle_integral,
    integral_function, root_path_length, CycleRecord,
};
pub use reduce::{integral_matrix, reduce_columns, reduce_matrix, reduce_to_h, GeneratorSet};
pub use report::{CycleJson, ReportError, ResultJson};
pub use select::{classify_cycles, is_contractible, labels_match, partition_homologous, select_p, ContractibilityTol};
pub use tree::{spanning_tree_bfs, SpanningTree};

use crate::complex::{build_laplacian_algebraic, build_boundaries, Laplacian1, SimplicialComplex2};
use crate::harmonic::{iterate_harmonic, HarmonicConfig, HarmonicError, HarmonicResult};
use crate::rng::derive_seed;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CycleBasisError {
    #[error(transparent)]
    Harmonic(#[from] HarmonicError),
    #[error("edge {edge} belongs to the spanning tree")]
    EdgeInTree { edge: usize },
    #[error("root {root} out of range for {vertex_count} vertices")]
    InvalidRoot { root: usize, vertex_count: usize },
    #[error("invalid spanning tree: {0}")]
    InvalidTree(String),
    #[error("{harmonics} harmonics over {candidates} candidate cycles reached rank {rank}; retry with another seed")]
    RankDeficientHarmonics { harmonics: usize, candidates: usize, rank: usize },
    #[error("invalid pipeline configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RootChoice {
    #[default]
    MaxId,
    Vertex(usize),
}

impl RootChoice {
    pub fn resolve(self, vertex_count: usize) -> Result<usize, CycleBasisError> {
        match self {
            RootChoice::MaxId if vertex_count > 0 => Ok(vertex_count - 1),
            RootChoice::MaxId => Err(CycleBasisError::InvalidRoot { root: 0, vertex_count }),
            RootChoice::Vertex(v) if v < vertex_count => Ok(v),
            RootChoice::Vertex(v) => Err(CycleBasisError::InvalidRoot { root: v, vertex_count }),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    /// `seed` here is the base seed; harmonic `i` uses `harmonic_seed(seed, i)`.
    pub harmonic: HarmonicConfig,
    pub contractibility: ContractibilityTol,
    /// Relative tolerance for matching labels.
    pub label_tol: f64,
    /// Number of harmonics forming each cycle label.
    pub label_harmonics: usize,
    pub pivot_tol: f64,
    pub root: RootChoice,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            harmonic: HarmonicConfig::default(),
            contractibility: ContractibilityTol::default(),
            label_tol: 1e-4,
            label_harmonics: 1,
            pivot_tol: 1e-8,
            root: RootChoice::MaxId,
        }
    }
}

impl PipelineConfig {
    pub fn with_seed(seed: u64) -> Self {
        let mut c = Self::default();
        c.harmonic.seed = seed;
        c
    }

    pub fn validate(&self) -> Result<(), CycleBasisError> {
        self.harmonic.validate()?;
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.label_tol) || !positive(self.pivot_tol) {
            return Err(CycleBasisError::InvalidConfig("tolerances must be positive".into()));
        }
        if !(self.contractibility.abs > 0.0 && self.contractibility.rel >= 0.0) {
            return Err(CycleBasisError::InvalidConfig("contractibility tolerance must be positive".into()));
        }
        if self.label_harmonics == 0 {
            return Err(CycleBasisError::InvalidConfig("at least one label harmonic is required".into()));
        }
        Ok(())
    }

    /// Config for harmonic number `i`.
    pub fn harmonic_config(&self, i: usize) -> HarmonicConfig {
        HarmonicConfig { seed: harmonic_seed(self.harmonic.seed, i), ..self.harmonic.clone() }
    }
}

/// Seed of the `i`-th harmonic of a run with base seed `base`.
pub fn harmonic_seed(base: u64, i: usize) -> u64 {
    derive_seed(base, i as u64)
}

/// Everything the centralized pipeline computes along the way.
#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub tree: SpanningTree,
    pub harmonics: Vec<HarmonicResult>,
    pub contractible: Vec<CycleRecord>,
    pub clusters: Vec<Vec<CycleRecord>>,
    pub generators: GeneratorSet,
}

impl PipelineOutput {
    pub fn delta(&self) -> f64 {
        self.harmonics.first().map_or(0.0, |h| h.delta_used)
    }

    pub fn iterations(&self) -> Vec<usize> {
        self.harmonics.iter().map(|h| h.iterations).collect()
    }

    pub fn to_result_json(&self, k: &SimplicialComplex2) -> ResultJson {
        ResultJson::new(k, &self.generators.h, self.iterations(), self.delta())
    }
}

fn euclid(y: &[f64]) -> f64 {
    y.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Runs harmonics `from..to` of `cfg`.
pub fn compute_harmonics(
    l: &Laplacian1,
    cfg: &PipelineConfig,
    from: usize,
    to: usize,
) -> Result<Vec<HarmonicResult>, CycleBasisError> {
    (from..to).map(|i| Ok(iterate_harmonic(l, &cfg.harmonic_config(i))?)).collect()
}

pub fn run_centralized(k: &SimplicialComplex2, cfg: &PipelineConfig) -> Result<PipelineOutput, CycleBasisError> {
    cfg.validate()?;
    let l = build_laplacian_algebraic(&build_boundaries(k));
    let root = cfg.root.resolve(k.vertex_count())?;
    let tree = spanning_tree_bfs(k, root)?;
    run_with_tree(k, &l, tree, cfg)
}

/// The label harmonics and what they decide: contractible cycles, label
/// clusters and the representatives `P`.
#[derive(Clone, Debug)]
pub struct CandidateSet {
    pub harmonics: Vec<HarmonicResult>,
    pub norms: Vec<f64>,
    pub contractible: Vec<CycleRecord>,
    pub clusters: Vec<Vec<CycleRecord>>,
    pub p: Vec<CycleRecord>,
}

/// First half of the pipeline, up to `P`. Needs at least one edge.
pub fn candidate_set(
    k: &SimplicialComplex2,
    l: &Laplacian1,
    tree: &SpanningTree,
    cfg: &PipelineConfig,
) -> Result<CandidateSet, CycleBasisError> {
    let harmonics = compute_harmonics(l, cfg, 0, cfg.label_harmonics)?;
    let labels: Vec<Vec<f64>> = harmonics.iter().map(|h| h.y.clone()).collect();
    let norms: Vec<f64> = labels.iter().map(|y| euclid(y)).collect();
    let records = build_cycle_records(k, tree, &labels);
    let (contractible, live) = classify_cycles(records, &norms, cfg.contractibility);
    let clusters = partition_homologous(live, cfg.label_tol);
    let p = select_p(&clusters);
    Ok(CandidateSet { harmonics, norms, contractible, clusters, p })
}

/// Pipeline on a given tree and Laplacian.
pub fn run_with_tree(
    k: &SimplicialComplex2,
    l: &Laplacian1,
    tree: SpanningTree,
    cfg: &PipelineConfig,
) -> Result<PipelineOutput, CycleBasisError> {
    cfg.validate()?;
    if k.edge_count() == 0 {
        return Ok(PipelineOutput {
            tree,
            harmonics: Vec::new(),
            contractible: Vec::new(),
            clusters: Vec::new(),
            generators: GeneratorSet::empty(),
        });
    }
    let CandidateSet { mut harmonics, contractible, clusters, p, .. } = candidate_set(k, l, &tree, cfg)?;
    if p.is_empty() {
        // only the first harmonic was needed
        harmonics.truncate(1);
        return Ok(PipelineOutput { tree, harmonics, contractible, clusters, generators: GeneratorSet::empty() });
    }
    let m = p.len();
    if harmonics.len() < m {
        harmonics.extend(compute_harmonics(l, cfg, harmonics.len(), m)?);
    }
    let ys: Vec<Vec<f64>> = harmonics[..m].iter().map(|h| h.y.clone()).collect();
    let generators = reduce_to_h(k, &tree, p, &ys, cfg.pivot_tol)?;
    Ok(PipelineOutput { tree, harmonics, contractible, clusters, generators })
}
