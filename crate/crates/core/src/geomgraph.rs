//! Random geometric graphs in the unit square with constant expected
//! degree, and their flag complexes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{component_labels, ComplexError, SimplicialComplex2};
use crate::rng::SplitMix64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("invalid generator configuration: {0}")]
    InvalidConfig(String),
    #[error("largest component has only {vertices} vertex")]
    TooSparse { vertices: usize },
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeomConfig {
    pub n: usize,
    /// Target expected degree `k`.
    pub avg_degree: f64,
    pub seed: u64,
}

impl GeomConfig {
    pub fn new(n: usize, avg_degree: f64, seed: u64) -> Self {
        Self { n, avg_degree, seed }
    }

    pub fn validate(&self) -> Result<(), GeomError> {
        if self.n < 2 {
            return Err(GeomError::InvalidConfig(format!("n = {} is below 2", self.n)));
        }
        if !(self.avg_degree > 0.0 && self.avg_degree.is_finite()) {
            return Err(GeomError::InvalidConfig(format!("average degree {} must be positive", self.avg_degree)));
        }
        Ok(())
    }

    /// `sqrt(k / (pi (n - 1)))`: a disc of this radius holds `k` of the other
    /// `n - 1` points on average, ignoring the square's boundary.
    pub fn radius(&self) -> f64 {
        (self.avg_degree / (std::f64::consts::PI * (self.n - 1) as f64)).sqrt()
    }
}

/// `n` points, coordinates drawn in order `x0, y0, x1, y1, ...` from the
/// SplitMix64 stream of `seed`.
pub fn sample_points(n: usize, seed: u64) -> Vec<[f64; 2]> {
    let mut g = SplitMix64::new(seed);
    (0..n).map(|_| [g.next_f64(), g.next_f64()]).collect()
}

/// Unit-disk graph of `points` at radius `r`, as sorted pairs `(i, j)`, `i < j`.
pub fn disk_graph(points: &[[f64; 2]], r: f64) -> Vec<(usize, usize)> {
    let r2 = r * r;
    let mut edges = Vec::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let dx = points[i][0] - points[j][0];
            let dy = points[i][1] - points[j][1];
            if dx * dx + dy * dy <= r2 {
                edges.push((i, j));
            }
        }
    }
    edges
}

/// Flag complex of the largest connected component (ties to the component
/// holding the smallest vertex), vertices renumbered in increasing order.
pub fn generate(cfg: &GeomConfig) -> Result<SimplicialComplex2, GeomError> {
    cfg.validate()?;
    let points = sample_points(cfg.n, cfg.seed);
    let edges = disk_graph(&points, cfg.radius());

    let mut adj = vec![Vec::new(); cfg.n];
    for &(a, b) in &edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let (label, count) = component_labels(cfg.n, &adj);
    let mut sizes = vec![0usize; count];
    for &l in &label {
        sizes[l] += 1;
    }
    let (best, &size) = sizes
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .expect("n >= 2");
    if size < 2 {
        return Err(GeomError::TooSparse { vertices: size });
    }
    let mut new_id = vec![usize::MAX; cfg.n];
    let mut next = 0;
    for v in 0..cfg.n {
        if label[v] == best {
            new_id[v] = next;
            next += 1;
        }
    }
    let kept = edges
        .into_iter()
        .filter(|&(a, _)| label[a] == best)
        .map(|(a, b)| (new_id[a], new_id[b]));
    Ok(SimplicialComplex2::flag_from_edges(size, kept)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeStats {
    pub mean: f64,
    /// Population variance.
    pub variance: f64,
    pub sum: u64,
    pub sum_sq: u64,
}

pub fn degree_stats(k: &SimplicialComplex2) -> DegreeStats {
    let n = k.vertex_count();
    let degrees = (0..n).map(|v| k.degree(v) as u64);
    let (sum, sum_sq) = degrees.fold((0u64, 0u64), |(s, q), d| (s + d, q + d * d));
    if n == 0 {
        return DegreeStats { mean: 0.0, variance: 0.0, sum, sum_sq };
    }
    let mean = sum as f64 / n as f64;
    let variance = sum_sq as f64 / n as f64 - mean * mean;
    DegreeStats { mean, variance: variance.max(0.0), sum, sum_sq }
}

/// `sum d_i^2 - sum d_i / 2`: the number of ordered lower-adjacent edge
/// pairs plus the diagonal.
pub fn lower_adjacency_count(k: &SimplicialComplex2) -> u64 {
    let s = degree_stats(k);
    s.sum_sq - s.sum / 2
}

/// `(mean over samples of lower_adjacency_count, 2 k (k - 1/4) n)`.
pub fn l1_nnz_expectation_check(samples: &[SimplicialComplex2], n: usize, k: f64) -> (f64, f64) {
    let formula = 2.0 * k * (k - 0.25) * n as f64;
    if samples.is_empty() {
        return (0.0, formula);
    }
    let total: u64 = samples.iter().map(lower_adjacency_count).sum();
    (total as f64 / samples.len() as f64, formula)
}
