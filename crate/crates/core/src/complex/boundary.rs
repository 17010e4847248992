use super::SimplicialComplex2;
use crate::sparse::SparseIntMatrix;

/// `d1` (vertices x edges) and `d2` (edges x triangles) in the standard bases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryOperators {
    pub d1: SparseIntMatrix,
    pub d2: SparseIntMatrix,
}

impl BoundaryOperators {
    pub fn vertex_count(&self) -> usize {
        self.d1.nrows()
    }

    pub fn edge_count(&self) -> usize {
        self.d1.ncols()
    }

    pub fn triangle_count(&self) -> usize {
        self.d2.ncols()
    }
}

/// Boundary matrices of `k`. Closure and connectivity were checked when `k`
/// was built, so this cannot fail.
pub fn build_boundaries(k: &SimplicialComplex2) -> BoundaryOperators {
    let d1_cols = k.edges().iter().map(|&[a, b]| vec![(a, -1), (b, 1)]).collect();
    let d2_cols = k
        .triangles()
        .iter()
        .map(|&[a, b, c]| {
            let id = |x, y| k.edge_id(x, y).expect("closed complex");
            vec![(id(b, c), 1), (id(a, c), -1), (id(a, b), 1)]
        })
        .collect();
    BoundaryOperators {
        d1: SparseIntMatrix::from_columns(k.vertex_count(), d1_cols),
        d2: SparseIntMatrix::from_columns(k.edge_count(), d2_cols),
    }
}
