use super::{BoundaryOperators, SimplicialComplex2};

/// First combinatorial Laplacian `L1 = d2 d2^T + d1^T d1`, stored by rows.
///
/// Entries are small integers held as `f64`, so comparisons between the two
/// constructions are exact. Each row lists `(column, value)` in ascending
/// column order; that order is the summation order of every product below.
#[derive(Clone, Debug, PartialEq)]
pub struct Laplacian1 {
    rows: Vec<Vec<(usize, f64)>>,
}

impl Laplacian1 {
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        debug_assert!(rows.iter().all(|r| r.windows(2).all(|w| w[0].0 < w[1].0)));
        Self { rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i]
            .binary_search_by_key(&j, |&(c, _)| c)
            .map(|k| self.rows[i][k].1)
            .unwrap_or(0.0)
    }

    pub fn row_abs_sum(&self, i: usize) -> f64 {
        self.rows[i].iter().map(|&(_, v)| v.abs()).sum()
    }

    /// `sum_j L[i][j] * y[j]` in ascending column order.
    #[inline]
    pub fn row_dot(&self, i: usize, y: &[f64]) -> f64 {
        row_dot(&self.rows[i], |j| y[j])
    }

    pub fn matvec(&self, y: &[f64]) -> Vec<f64> {
        (0..self.dim()).map(|i| self.row_dot(i, y)).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, r)| r.iter().all(|&(j, v)| self.get(j, i) == v))
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut d = vec![vec![0.0; n]; n];
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, v) in r {
                d[i][j] = v;
            }
        }
        d
    }
}

/// Row product with values fetched through `value`. Shared by the
/// centralized iteration and the simulated edge processors so both sum in
/// the same order.
#[inline]
pub fn row_dot(row: &[(usize, f64)], mut value: impl FnMut(usize) -> f64) -> f64 {
    row.iter().fold(0.0, |acc, &(j, v)| acc + v * value(j))
}

/// `d2 d2^T + d1^T d1` by exact sparse integer products.
pub fn build_laplacian_algebraic(b: &BoundaryOperators) -> Laplacian1 {
    let up = b.d2.mul(&b.d2.transpose());
    let down = b.d1.transpose().mul(&b.d1);
    let sum = up.add(&down);
    // symmetric, so column j doubles as row j
    let rows = sum
        .columns()
        .map(|c| c.iter().map(|&(i, v)| (i, v as f64)).collect())
        .collect();
    Laplacian1 { rows }
}

/// Entry-by-entry construction from adjacency: `deg_u + 2` on the diagonal,
/// `+1` / `-1` for lower-adjacent edges that share no triangle and induce
/// the same / opposite orientation on their shared vertex, 0 otherwise.
pub fn build_laplacian_combinatorial(k: &SimplicialComplex2) -> Laplacian1 {
    let rows = (0..k.edge_count())
        .map(|e| {
            let mut row = vec![(e, (k.upper_degree(e) + 2) as f64)];
            for v in k.edge(e) {
                let own = k.incidence_sign(e, v);
                for &f in k.incident_edges(v) {
                    if f == e || k.upper_adjacent(e, f) {
                        continue;
                    }
                    let similar = own == k.incidence_sign(f, v);
                    row.push((f, if similar { 1.0 } else { -1.0 }));
                }
            }
            row.sort_unstable_by_key(|&(j, _)| j);
            row
        })
        .collect();
    Laplacian1 { rows }
}

/// `||L1||_1`, the largest absolute column sum (equal to the row version).
pub fn l1_one_norm(l: &Laplacian1) -> f64 {
    (0..l.dim()).map(|i| l.row_abs_sum(i)).fold(0.0, f64::max)
}

/// The two nonzero counts of `L1` next to the degree formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NnzIdentity {
    /// Diagonal plus lower-adjacent pairs that share no triangle: the actual
    /// sparsity pattern of `L1`.
    pub structural: usize,
    /// Diagonal plus every lower-adjacent pair, ignoring triangles:
    /// `sum over edges (a,b) of d_a + d_b - 1`.
    pub lower_adjacency: usize,
    /// `sum d_i^2 - (1/2) sum d_i` over vertex degrees.
    pub formula_value: usize,
}

pub fn nnz_degree_identity(k: &SimplicialComplex2) -> NnzIdentity {
    let structural = (0..k.edge_count())
        .map(|e| {
            let [a, b] = k.edge(e);
            let lower = k.degree(a) + k.degree(b) - 2;
            // each coface triangle removes the two edges it shares with e
            1 + lower - 2 * k.upper_degree(e)
        })
        .sum();
    let lower_adjacency = k
        .edges()
        .iter()
        .map(|&[a, b]| k.degree(a) + k.degree(b) - 1)
        .sum();
    let (sum_sq, sum): (usize, usize) = (0..k.vertex_count())
        .map(|v| k.degree(v))
        .fold((0, 0), |(sq, s), d| (sq + d * d, s + d));
    NnzIdentity { structural, lower_adjacency, formula_value: sum_sq - sum / 2 }
}
