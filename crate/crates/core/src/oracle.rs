//! Exact rational ground truth: ranks, Betti number, boundary membership,
//! homology of cycle pairs, and generating-set verification.
//!
//! Everything here is arbitrary-precision. The image of `d2` is held as an
//! echelon basis whose vectors each end (highest edge index) at a distinct
//! pivot with coefficient 1. Reducing a chain against it, from the top index
//! down, yields the unique representative that is zero on every pivot; two
//! chains differ by a boundary exactly when these normal forms agree.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::complex::{BoundaryOperators, SparseChain};
use crate::sparse::SparseIntMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("chain {index} is not a cycle (d1 * c != 0)")]
    NotACycle { index: usize },
}

pub type RationalVector = BTreeMap<usize, BigRational>;

/// Sparse exact matrix, stored by columns.
#[derive(Clone, Debug, Default)]
pub struct RationalMatrix {
    rows: usize,
    cols: Vec<RationalVector>,
}

impl RationalMatrix {
    pub fn new(rows: usize) -> Self {
        Self { rows, cols: Vec::new() }
    }

    pub fn from_int(m: &SparseIntMatrix) -> Self {
        let cols = m.columns().map(|c| c.iter().map(|&(i, v)| (i, int(v))).collect()).collect();
        Self { rows: m.nrows(), cols }
    }

    pub fn push_column(&mut self, col: RationalVector) {
        assert!(col.keys().all(|&i| i < self.rows));
        self.cols.push(col);
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn chain_to_rational(c: &SparseChain) -> RationalVector {
    c.iter().map(|(e, v)| (e, int(v))).collect()
}

/// Incremental echelon basis over the rationals.
#[derive(Clone, Debug, Default)]
pub struct EchelonBasis {
    // pivot row -> basis vector (pivot coefficient normalised to 1)
    by_pivot: HashMap<usize, RationalVector>,
}

impl EchelonBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.by_pivot.len()
    }

    /// Canonical representative of `v` modulo the span.
    pub fn reduce(&self, mut v: RationalVector) -> RationalVector {
        let mut upper = usize::MAX;
        loop {
            let hit = v
                .range(..upper)
                .rev()
                .find(|(i, _)| self.by_pivot.contains_key(i))
                .map(|(&i, c)| (i, c.clone()));
            let Some((pivot, coef)) = hit else { break };
            for (&i, b) in &self.by_pivot[&pivot] {
                let entry = v.entry(i).or_insert_with(BigRational::zero);
                *entry -= &coef * b;
                if entry.is_zero() {
                    v.remove(&i);
                }
            }
            upper = pivot;
        }
        v
    }

    /// Adds `v` to the span; returns whether it was independent.
    pub fn insert(&mut self, v: RationalVector) -> bool {
        let r = self.reduce(v);
        let Some((&pivot, lead)) = r.iter().next_back() else { return false };
        let lead = lead.clone();
        let normalized = if lead.is_one() {
            r
        } else {
            r.into_iter().map(|(i, c)| (i, c / &lead)).collect()
        };
        self.by_pivot.insert(pivot, normalized);
        true
    }
}

/// Exact rank by rational elimination.
pub fn rank(m: &RationalMatrix) -> usize {
    let mut basis = EchelonBasis::new();
    m.cols.iter().filter(|c| basis.insert((*c).clone())).count()
}

/// Exact homology oracle for one complex.
#[derive(Clone, Debug)]
pub struct HomologyOracle {
    d1: SparseIntMatrix,
    edge_count: usize,
    rank_d1: usize,
    boundaries: EchelonBasis,
}

impl HomologyOracle {
    pub fn new(b: &BoundaryOperators) -> Self {
        let rank_d1 = rank(&RationalMatrix::from_int(&b.d1));
        let mut boundaries = EchelonBasis::new();
        for col in RationalMatrix::from_int(&b.d2).cols {
            boundaries.insert(col);
        }
        Self { d1: b.d1.clone(), edge_count: b.edge_count(), rank_d1, boundaries }
    }

    pub fn rank_d1(&self) -> usize {
        self.rank_d1
    }

    pub fn rank_d2(&self) -> usize {
        self.boundaries.rank()
    }

    /// `b1 = (|E| - rank d1) - rank d2`.
    pub fn betti1(&self) -> usize {
        self.edge_count - self.rank_d1 - self.rank_d2()
    }

    fn check_cycle(&self, c: &SparseChain, index: usize) -> Result<(), OracleError> {
        let mut acc: HashMap<usize, i64> = HashMap::new();
        for (e, v) in c.iter() {
            for &(vertex, s) in self.d1.col(e) {
                *acc.entry(vertex).or_default() += s * v;
            }
        }
        if acc.values().all(|&x| x == 0) {
            Ok(())
        } else {
            Err(OracleError::NotACycle { index })
        }
    }

    /// Representative of `c` modulo the boundaries, zero on every pivot.
    pub fn normal_form(&self, c: &SparseChain) -> RationalVector {
        self.boundaries.reduce(chain_to_rational(c))
    }

    /// Sign-free class key: two cycles are homologous up to sign exactly
    /// when their keys are equal. The key of a boundary is empty.
    pub fn class_key(&self, c: &SparseChain) -> Result<Vec<(usize, BigRational)>, OracleError> {
        self.check_cycle(c, 0)?;
        let nf = self.normal_form(c);
        let flip = nf.values().next_back().is_some_and(|v| v.is_negative());
        Ok(nf.into_iter().map(|(i, v)| (i, if flip { -v } else { v })).collect())
    }

    pub fn is_boundary(&self, c: &SparseChain) -> Result<bool, OracleError> {
        self.check_cycle(c, 0)?;
        Ok(self.normal_form(c).is_empty())
    }

    /// `c1 - c2` or `c1 + c2` is a boundary (tree cycles carry no preferred sign).
    pub fn are_homologous(&self, c1: &SparseChain, c2: &SparseChain) -> Result<bool, OracleError> {
        self.check_cycle(c1, 0)?;
        self.check_cycle(c2, 1)?;
        Ok(self.normal_form(&c1.sub(c2)).is_empty() || self.normal_form(&c1.add(c2)).is_empty())
    }

    /// `|H| == b1` and the classes of `H` are independent:
    /// `rank [d2 | H] == rank d2 + |H|`.
    pub fn verify_generating_set(&self, h: &[SparseChain]) -> Result<bool, OracleError> {
        for (i, c) in h.iter().enumerate() {
            self.check_cycle(c, i)?;
        }
        if h.len() != self.betti1() {
            return Ok(false);
        }
        let mut span = self.boundaries.clone();
        Ok(h.iter().all(|c| span.insert(chain_to_rational(c))))
    }
}

pub fn betti1(b: &BoundaryOperators) -> usize {
    HomologyOracle::new(b).betti1()
}

pub fn is_boundary(c: &SparseChain, b: &BoundaryOperators) -> Result<bool, OracleError> {
    HomologyOracle::new(b).is_boundary(c)
}

pub fn are_homologous(
    c1: &SparseChain,
    c2: &SparseChain,
    b: &BoundaryOperators,
) -> Result<bool, OracleError> {
    HomologyOracle::new(b).are_homologous(c1, c2)
}

pub fn verify_generating_set(h: &[SparseChain], b: &BoundaryOperators) -> Result<bool, OracleError> {
    HomologyOracle::new(b).verify_generating_set(h)
}
