use serde::{Deserialize, Serialize};

use super::{cycle_integral, integral_function, CycleBasisError, CycleRecord, SpanningTree};
use crate::complex::SimplicialComplex2;

/// `P`, the integral matrix `R` (row `i` = harmonic `i`, column `j` = cycle
/// `j` of `P`) and the independent subset `H`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSet {
    pub p: Vec<CycleRecord>,
    pub r: Vec<Vec<f64>>,
    /// Indices into `p` of the kept columns, ascending.
    pub kept: Vec<usize>,
    pub h: Vec<CycleRecord>,
}

impl GeneratorSet {
    pub fn empty() -> Self {
        Self { p: Vec::new(), r: Vec::new(), kept: Vec::new(), h: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.h.len()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Left-to-right modified Gram-Schmidt over `columns`. A column is kept when
/// its residual norm exceeds `pivot_tol` times the largest column norm.
/// Returns the kept column indices.
pub fn reduce_columns(columns: &[Vec<f64>], pivot_tol: f64) -> Vec<usize> {
    let scale = columns.iter().map(|c| norm(c)).fold(0.0, f64::max);
    if scale == 0.0 {
        return Vec::new();
    }
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut kept = Vec::new();
    for (j, col) in columns.iter().enumerate() {
        let mut v = col.clone();
        // two passes keep the basis orthogonal to working precision
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &v);
                v.iter_mut().zip(q).for_each(|(x, qi)| *x -= c * qi);
            }
        }
        let r = norm(&v);
        if r > pivot_tol * scale {
            v.iter_mut().for_each(|x| *x /= r);
            basis.push(v);
            kept.push(j);
        }
    }
    kept
}

/// `R[i][j] = <y_i, p_j>` evaluated through the integral function of `t`.
pub fn integral_matrix(
    k: &SimplicialComplex2,
    t: &SpanningTree,
    p: &[CycleRecord],
    harmonics: &[Vec<f64>],
) -> Vec<Vec<f64>> {
    harmonics
        .iter()
        .map(|y| {
            let f = integral_function(k, t, y);
            p.iter().map(|c| cycle_integral(&f, y, k, c.nontree_edge)).collect()
        })
        .collect()
}

/// Reduces an already assembled `R` (`m` rows, `|P|` columns) and keeps the
/// records whose columns are independent.
pub fn reduce_matrix(p: Vec<CycleRecord>, r: Vec<Vec<f64>>, pivot_tol: f64) -> Result<GeneratorSet, CycleBasisError> {
    if p.is_empty() {
        return Ok(GeneratorSet { p, r, kept: Vec::new(), h: Vec::new() });
    }
    if r.len() < p.len() {
        return Err(CycleBasisError::RankDeficientHarmonics { harmonics: r.len(), candidates: p.len(), rank: 0 });
    }
    let columns: Vec<Vec<f64>> = (0..p.len()).map(|j| r.iter().map(|row| row[j]).collect()).collect();
    let kept = reduce_columns(&columns, pivot_tol);
    if kept.is_empty() {
        // a non-contractible cycle integrates to zero against every harmonic
        return Err(CycleBasisError::RankDeficientHarmonics { harmonics: r.len(), candidates: p.len(), rank: 0 });
    }
    let h = kept.iter().map(|&j| p[j].clone()).collect();
    Ok(GeneratorSet { p, r, kept, h })
}

/// Builds `R = Y^T P` and reduces it.
pub fn reduce_to_h(
    k: &SimplicialComplex2,
    t: &SpanningTree,
    p: Vec<CycleRecord>,
    harmonics: &[Vec<f64>],
    pivot_tol: f64,
) -> Result<GeneratorSet, CycleBasisError> {
    let r = integral_matrix(k, t, &p, harmonics);
    reduce_matrix(p, r, pivot_tol)
}
