//! Column-major sparse integer matrices for the boundary operators.

/// Sparse integer matrix stored column by column; every column keeps its
/// `(row, value)` pairs sorted by row with no explicit zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseIntMatrix {
    rows: usize,
    cols: Vec<Vec<(usize, i64)>>,
}

impl SparseIntMatrix {
    pub fn zeros(rows: usize, ncols: usize) -> Self {
        Self { rows, cols: vec![Vec::new(); ncols] }
    }

    /// Builds from columns; entries are sorted and zeros dropped. Duplicate
    /// rows within a column are summed.
    pub fn from_columns(rows: usize, cols: Vec<Vec<(usize, i64)>>) -> Self {
        let cols = cols
            .into_iter()
            .map(|mut c| {
                c.sort_unstable_by_key(|&(r, _)| r);
                let mut out: Vec<(usize, i64)> = Vec::with_capacity(c.len());
                for (r, v) in c {
                    assert!(r < rows, "row {r} out of range for {rows} rows");
                    match out.last_mut() {
                        Some(last) if last.0 == r => last.1 += v,
                        _ => out.push((r, v)),
                    }
                }
                out.retain(|&(_, v)| v != 0);
                out
            })
            .collect();
        Self { rows, cols }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn col(&self, j: usize) -> &[(usize, i64)] {
        &self.cols[j]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[(usize, i64)]> {
        self.cols.iter().map(Vec::as_slice)
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.cols[j]
            .binary_search_by_key(&i, |&(r, _)| r)
            .map(|k| self.cols[j][k].1)
            .unwrap_or(0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = vec![Vec::new(); self.rows];
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                t[i].push((j, v));
            }
        }
        // columns were visited in order, so each new column is already sorted
        Self { rows: self.cols.len(), cols: t }
    }

    /// Exact product `self * rhs`.
    pub fn mul(&self, rhs: &SparseIntMatrix) -> SparseIntMatrix {
        assert_eq!(self.ncols(), rhs.nrows(), "dimension mismatch in sparse product");
        let mut acc = vec![0i64; self.rows];
        let mut touched: Vec<usize> = Vec::new();
        let cols = rhs
            .cols
            .iter()
            .map(|rcol| {
                for &(k, b) in rcol {
                    for &(i, a) in &self.cols[k] {
                        if acc[i] == 0 {
                            touched.push(i);
                        }
                        acc[i] += a * b;
                    }
                }
                touched.sort_unstable();
                touched.dedup();
                let col: Vec<(usize, i64)> = touched
                    .iter()
                    .filter_map(|&i| {
                        let v = std::mem::take(&mut acc[i]);
                        (v != 0).then_some((i, v))
                    })
                    .collect();
                touched.clear();
                col
            })
            .collect();
        SparseIntMatrix { rows: self.rows, cols }
    }

    /// Entry-wise sum of two matrices of equal shape.
    pub fn add(&self, rhs: &SparseIntMatrix) -> SparseIntMatrix {
        assert_eq!((self.rows, self.ncols()), (rhs.rows, rhs.ncols()));
        let cols = self
            .cols
            .iter()
            .zip(&rhs.cols)
            .map(|(a, b)| {
                let mut merged = a.clone();
                merged.extend_from_slice(b);
                merged
            })
            .collect();
        SparseIntMatrix::from_columns(self.rows, cols)
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0; self.ncols()]; self.rows];
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                d[i][j] = v;
            }
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, cols: Vec<Vec<(usize, i64)>>) -> SparseIntMatrix {
        SparseIntMatrix::from_columns(rows, cols)
    }

    #[test]
    fn product_matches_dense() {
        // [[1,2],[0,-1]] * [[3],[4]] = [[11],[-4]]
        let a = m(2, vec![vec![(0, 1)], vec![(0, 2), (1, -1)]]);
        let b = m(2, vec![vec![(0, 3), (1, 4)]]);
        assert_eq!(a.mul(&b).to_dense(), vec![vec![11], vec![-4]]);
    }

    #[test]
    fn cancellation_leaves_no_explicit_zeros() {
        let a = m(1, vec![vec![(0, 1)], vec![(0, 1)]]);
        let b = m(2, vec![vec![(0, 1), (1, -1)]]);
        let p = a.mul(&b);
        assert!(p.is_zero());
        assert_eq!(p.nnz(), 0);
    }

    #[test]
    fn transpose_round_trip() {
        let a = m(3, vec![vec![(2, 5), (0, 1)], vec![], vec![(1, -2)]]);
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(a.transpose().get(0, 2), 5);
    }
}
