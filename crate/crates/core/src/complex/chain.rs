use serde::{Deserialize, Serialize};

use super::SimplicialComplex2;

/// Integer 1-chain: sorted `(edge id, coefficient)` pairs without zeros.
///
/// Tree cycles have coefficients in `{-1, 0, 1}`, but sums and differences
/// of cycles may grow past that, so the coefficient type is a full `i64`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SparseChain {
    entries: Vec<(usize, i64)>,
}

impl SparseChain {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sorts, merges repeated edges, and drops zero coefficients.
    pub fn from_entries(mut entries: Vec<(usize, i64)>) -> Self {
        entries.sort_unstable_by_key(|&(e, _)| e);
        let mut out: Vec<(usize, i64)> = Vec::with_capacity(entries.len());
        for (e, c) in entries {
            match out.last_mut() {
                Some(last) if last.0 == e => last.1 += c,
                _ => out.push((e, c)),
            }
        }
        out.retain(|&(_, c)| c != 0);
        Self { entries: out }
    }

    pub fn entries(&self) -> &[(usize, i64)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.entries.iter().copied()
    }

    /// Number of edges carrying a nonzero coefficient.
    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn coefficient(&self, e: usize) -> i64 {
        self.entries
            .binary_search_by_key(&e, |&(k, _)| k)
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    /// `<y, self>` summed left to right in edge order.
    pub fn dot(&self, y: &[f64]) -> f64 {
        self.entries.iter().fold(0.0, |acc, &(e, c)| acc + c as f64 * y[e])
    }

    pub fn neg(&self) -> Self {
        Self { entries: self.entries.iter().map(|&(e, c)| (e, -c)).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, -1)
    }

    fn combine(&self, other: &Self, sign: i64) -> Self {
        let mut all = self.entries.clone();
        all.extend(other.entries.iter().map(|&(e, c)| (e, sign * c)));
        Self::from_entries(all)
    }

    /// `d1 * self` as sorted `(vertex, coefficient)` pairs without zeros.
    pub fn boundary(&self, k: &SimplicialComplex2) -> Vec<(usize, i64)> {
        let mut acc: Vec<(usize, i64)> = Vec::with_capacity(2 * self.entries.len());
        for &(e, c) in &self.entries {
            let [a, b] = k.edge(e);
            acc.push((a, -c));
            acc.push((b, c));
        }
        Self::from_entries(acc).entries
    }

    pub fn is_cycle(&self, k: &SimplicialComplex2) -> bool {
        self.boundary(k).is_empty()
    }

    pub fn to_dense(&self, len: usize) -> Vec<f64> {
        let mut v = vec![0.0; len];
        for &(e, c) in &self.entries {
            v[e] = c as f64;
        }
        v
    }
}

impl FromIterator<(usize, i64)> for SparseChain {
    fn from_iter<T: IntoIterator<Item = (usize, i64)>>(iter: T) -> Self {
        Self::from_entries(iter.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::fixtures;

    #[test]
    fn normalizes_entries() {
        let c = SparseChain::from_entries(vec![(2, 1), (0, -1), (2, -1), (1, 3)]);
        assert_eq!(c.entries(), &[(0, -1), (1, 3)]);
    }

    #[test]
    fn triangle_loop_is_cycle() {
        let k = fixtures::hollow_triangle();
        let c = SparseChain::from_entries(vec![(0, 1), (1, -1), (2, 1)]);
        assert!(c.is_cycle(&k));
        let open = SparseChain::from_entries(vec![(0, 1), (2, 1)]);
        assert_eq!(open.boundary(&k), vec![(0, -1), (2, 1)]);
    }

    #[test]
    fn dot_and_arithmetic() {
        let c = SparseChain::from_entries(vec![(0, 1), (2, -1)]);
        assert_eq!(c.dot(&[2.0, 5.0, 0.5]), 1.5);
        assert!(c.sub(&c).is_empty());
        assert_eq!(c.add(&c).coefficient(2), -2);
        assert_eq!(c.neg().coefficient(0), -1);
    }
}
