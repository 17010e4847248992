use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::CycleRecord;
use crate::complex::{SimplicialComplex2, SparseChain};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReportError {
    #[error("cycle {cycle}: ({0}, {1}) is not an edge of the complex", .edge.0, .edge.1)]
    UnknownEdge { cycle: usize, edge: (usize, usize) },
    #[error("cycle {cycle}: {edges} edges but {signs} signs")]
    LengthMismatch { cycle: usize, edges: usize, signs: usize },
    #[error("cycle {cycle}: sign {sign} is not +1 or -1")]
    BadSign { cycle: usize, sign: i64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleJson {
    pub edges: Vec<[usize; 2]>,
    pub signs: Vec<i64>,
    pub label: f64,
    pub hop_length: usize,
}

/// Serialized pipeline result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultJson {
    pub betti1_estimate: usize,
    pub cycles: Vec<CycleJson>,
    pub iterations_per_harmonic: Vec<usize>,
    pub delta: f64,
}

impl ResultJson {
    pub fn new(k: &SimplicialComplex2, h: &[CycleRecord], iterations: Vec<usize>, delta: f64) -> Self {
        let cycles = h
            .iter()
            .map(|r| CycleJson {
                edges: r.chain.iter().map(|(e, _)| k.edge(e)).collect(),
                signs: r.chain.iter().map(|(_, s)| s).collect(),
                label: r.label,
                hop_length: r.hop_length,
            })
            .collect();
        Self { betti1_estimate: h.len(), cycles, iterations_per_harmonic: iterations, delta }
    }

    /// The cycles as chains of `k`.
    pub fn to_chains(&self, k: &SimplicialComplex2) -> Result<Vec<SparseChain>, ReportError> {
        self.cycles
            .iter()
            .enumerate()
            .map(|(ci, c)| {
                if c.edges.len() != c.signs.len() {
                    return Err(ReportError::LengthMismatch { cycle: ci, edges: c.edges.len(), signs: c.signs.len() });
                }
                c.edges
                    .iter()
                    .zip(&c.signs)
                    .map(|(&[a, b], &s)| {
                        if s != 1 && s != -1 {
                            return Err(ReportError::BadSign { cycle: ci, sign: s });
                        }
                        let e = k.edge_id(a, b).ok_or(ReportError::UnknownEdge { cycle: ci, edge: (a, b) })?;
                        Ok((e, s))
                    })
                    .collect::<Result<Vec<_>, _>>()
                    .map(SparseChain::from_entries)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::fixtures;

    #[test]
    fn round_trip_through_chains() {
        let k = fixtures::hollow_triangle();
        let rec = CycleRecord {
            nontree_edge: 0,
            terminals: (0, 1),
            chain: SparseChain::from_entries(vec![(0, 1), (1, -1), (2, 1)]),
            integrals: vec![1.5],
            label: 1.5,
            hop_length: 3,
        };
        let r = ResultJson::new(&k, &[rec.clone()], vec![10], 0.25);
        assert_eq!(r.cycles[0].edges, vec![[0, 1], [0, 2], [1, 2]]);
        assert_eq!(r.to_chains(&k).unwrap(), vec![rec.chain]);
    }

    #[test]
    fn rejects_unknown_edges_and_signs() {
        let k = fixtures::path(3);
        let mut r = ResultJson {
            betti1_estimate: 1,
            cycles: vec![CycleJson { edges: vec![[0, 2]], signs: vec![1], label: 1.0, hop_length: 1 }],
            iterations_per_harmonic: vec![],
            delta: 0.5,
        };
        assert!(matches!(r.to_chains(&k), Err(ReportError::UnknownEdge { .. })));
        r.cycles[0] = CycleJson { edges: vec![[0, 1]], signs: vec![2], label: 1.0, hop_length: 1 };
        assert!(matches!(r.to_chains(&k), Err(ReportError::BadSign { .. })));
        r.cycles[0].signs.clear();
        assert!(matches!(r.to_chains(&k), Err(ReportError::LengthMismatch { .. })));
    }
}
