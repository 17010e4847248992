//! The simplicial 2-skeleton and everything derived from it directly:
//! boundary operators, the first combinatorial Laplacian, 1-chains, and the
//! `.sc` text format.
//!
//! Orientation is fixed by vertex order. Edge `(i, j)` with `i < j` runs
//! `i -> j`, so `d1` puts `-1` on `i` and `+1` on `j`. Triangle `(i, j, k)`
//! with `i < j < k` has boundary `+(j,k) - (i,k) + (i,j)`. Edge ids are the
//! positions of edges in lexicographic order.

mod boundary;
mod chain;
mod io;
mod laplacian;

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

pub use boundary::{build_boundaries, BoundaryOperators};
pub use chain::SparseChain;
pub use io::{parse_sc, read_sc, to_sc_string, write_sc};
pub use laplacian::{
    build_laplacian_algebraic, build_laplacian_combinatorial, l1_one_norm, nnz_degree_identity,
    row_dot, Laplacian1, NnzIdentity,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("vertex {vertex} out of range for a complex with {vertex_count} vertices")]
    VertexOutOfRange { vertex: usize, vertex_count: usize },
    #[error("{kind} {index} is not strictly increasing in its vertices")]
    Degenerate { kind: &'static str, index: usize },
    #[error("{kind} {index} is out of lexicographic order")]
    Unsorted { kind: &'static str, index: usize },
    #[error("{kind} {index} is a duplicate")]
    Duplicate { kind: &'static str, index: usize },
    #[error("triangle {triangle:?} lacks its edge {missing:?}")]
    ClosureViolation { triangle: [usize; 3], missing: [usize; 2] },
    #[error("1-skeleton is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("io error: {0}")]
    Io(String),
}

/// Immutable 2-skeleton: vertices `0..n`, sorted unique edges and triangles,
/// closed under faces, with a connected 1-skeleton.
#[derive(Clone, Debug)]
pub struct SimplicialComplex2 {
    vertex_count: usize,
    edges: Vec<[usize; 2]>,
    triangles: Vec<[usize; 3]>,
    edge_index: HashMap<[usize; 2], usize>,
    // vertex -> incident edge ids, ascending
    incident: Vec<Vec<usize>>,
    // vertex -> neighbouring vertices, ascending
    neighbors: Vec<Vec<usize>>,
    // edge -> triangles having it as a face
    cofaces: Vec<Vec<usize>>,
}

impl PartialEq for SimplicialComplex2 {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_count == other.vertex_count
            && self.edges == other.edges
            && self.triangles == other.triangles
    }
}

impl Eq for SimplicialComplex2 {}

impl SimplicialComplex2 {
    /// Validates and builds a complex from already-sorted records.
    pub fn new(
        vertex_count: usize,
        edges: Vec<[usize; 2]>,
        triangles: Vec<[usize; 3]>,
    ) -> Result<Self, ComplexError> {
        check_records(vertex_count, &edges, "edge")?;
        check_records(vertex_count, &triangles, "triangle")?;

        let edge_index: HashMap<[usize; 2], usize> =
            edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();

        let mut cofaces = vec![Vec::new(); edges.len()];
        for (t, &[a, b, c]) in triangles.iter().enumerate() {
            for face in [[a, b], [a, c], [b, c]] {
                match edge_index.get(&face) {
                    Some(&e) => cofaces[e].push(t),
                    None => {
                        return Err(ComplexError::ClosureViolation {
                            triangle: [a, b, c],
                            missing: face,
                        })
                    }
                }
            }
        }

        let mut incident = vec![Vec::new(); vertex_count];
        let mut neighbors = vec![Vec::new(); vertex_count];
        for (e, &[a, b]) in edges.iter().enumerate() {
            incident[a].push(e);
            incident[b].push(e);
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for n in &mut neighbors {
            n.sort_unstable();
        }

        let complex = Self { vertex_count, edges, triangles, edge_index, incident, neighbors, cofaces };
        let components = complex.component_labels().1;
        if components > 1 {
            return Err(ComplexError::Disconnected { components });
        }
        Ok(complex)
    }

    /// Sorts and deduplicates the records (and their vertex order) before
    /// validating. Triangle closure and connectivity are still enforced.
    pub fn from_unsorted(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        triangles: impl IntoIterator<Item = (usize, usize, usize)>,
    ) -> Result<Self, ComplexError> {
        let mut es: Vec<[usize; 2]> = edges
            .into_iter()
            .map(|(a, b)| if a < b { [a, b] } else { [b, a] })
            .collect();
        es.sort_unstable();
        es.dedup();
        let mut ts: Vec<[usize; 3]> = triangles
            .into_iter()
            .map(|(a, b, c)| {
                let mut t = [a, b, c];
                t.sort_unstable();
                t
            })
            .collect();
        ts.sort_unstable();
        ts.dedup();
        Self::new(vertex_count, es, ts)
    }

    /// Flag (clique) complex of a graph: every 3-clique becomes a triangle.
    pub fn flag_from_edges(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, ComplexError> {
        let mut es: Vec<[usize; 2]> = edges
            .into_iter()
            .map(|(a, b)| if a < b { [a, b] } else { [b, a] })
            .collect();
        es.sort_unstable();
        es.dedup();
        let triangles = flag_triangles(vertex_count, &es);
        Self::new(vertex_count, es, triangles)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> [usize; 2] {
        self.edges[e]
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Id of the edge joining `a` and `b`, in either order.
    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        let key = if a < b { [a, b] } else { [b, a] };
        self.edge_index.get(&key).copied()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn incident_edges(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    /// Number of triangles having edge `e` as a face.
    pub fn upper_degree(&self, e: usize) -> usize {
        self.cofaces[e].len()
    }

    pub fn cofaces(&self, e: usize) -> &[usize] {
        &self.cofaces[e]
    }

    /// Whether two distinct edges are faces of a common triangle.
    pub fn upper_adjacent(&self, e: usize, f: usize) -> bool {
        self.cofaces[e].iter().any(|t| self.cofaces[f].contains(t))
    }

    /// Coefficient of vertex `v` in the boundary of edge `e` (0 if not incident).
    pub fn incidence_sign(&self, e: usize, v: usize) -> i64 {
        let [a, b] = self.edges[e];
        if v == a {
            -1
        } else if v == b {
            1
        } else {
            0
        }
    }

    /// First Betti number of a triangle-free graph, `|E| - N + 1`; only the
    /// cycle rank, ignoring triangles.
    pub fn cycle_rank(&self) -> usize {
        (self.edges.len() + 1).saturating_sub(self.vertex_count)
    }

    fn component_labels(&self) -> (Vec<usize>, usize) {
        component_labels(self.vertex_count, &self.neighbors)
    }
}

/// Connected components by BFS over adjacency lists; labels are assigned in
/// order of each component's smallest vertex.
pub(crate) fn component_labels(n: usize, neighbors: &[Vec<usize>]) -> (Vec<usize>, usize) {
    let mut label = vec![usize::MAX; n];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = count;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &w in &neighbors[u] {
                if label[w] == usize::MAX {
                    label[w] = count;
                    queue.push_back(w);
                }
            }
        }
        count += 1;
    }
    (label, count)
}

/// All 3-cliques of a graph given by sorted unique edges, in lexicographic order.
pub(crate) fn flag_triangles(n: usize, edges: &[[usize; 2]]) -> Vec<[usize; 3]> {
    // forward adjacency: higher neighbours only
    let mut up = vec![Vec::new(); n];
    for &[a, b] in edges {
        up[a].push(b);
    }
    let mut out = Vec::new();
    for a in 0..n {
        let ua = &up[a];
        for (x, &b) in ua.iter().enumerate() {
            let ub = &up[b];
            for &c in &ua[x + 1..] {
                if ub.binary_search(&c).is_ok() {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

fn check_records<const K: usize>(
    n: usize,
    records: &[[usize; K]],
    kind: &'static str,
) -> Result<(), ComplexError> {
    for (idx, r) in records.iter().enumerate() {
        if let Some(&v) = r.iter().find(|&&v| v >= n) {
            return Err(ComplexError::VertexOutOfRange { vertex: v, vertex_count: n });
        }
        if r.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ComplexError::Degenerate { kind, index: idx });
        }
        if idx > 0 {
            match records[idx - 1].cmp(r) {
                std::cmp::Ordering::Less => {}
                std::cmp::Ordering::Equal => return Err(ComplexError::Duplicate { kind, index: idx }),
                std::cmp::Ordering::Greater => return Err(ComplexError::Unsorted { kind, index: idx }),
            }
        }
    }
    Ok(())
}

/// Small named complexes used throughout the tests and examples.
pub mod fixtures {
    use super::SimplicialComplex2;

    pub fn single_edge() -> SimplicialComplex2 {
        SimplicialComplex2::new(2, vec![[0, 1]], vec![]).unwrap()
    }

    pub fn hollow_triangle() -> SimplicialComplex2 {
        SimplicialComplex2::new(3, vec![[0, 1], [0, 2], [1, 2]], vec![]).unwrap()
    }

    pub fn filled_triangle() -> SimplicialComplex2 {
        SimplicialComplex2::new(3, vec![[0, 1], [0, 2], [1, 2]], vec![[0, 1, 2]]).unwrap()
    }

    pub fn path(n: usize) -> SimplicialComplex2 {
        SimplicialComplex2::new(n, (1..n).map(|i| [i - 1, i]).collect(), vec![]).unwrap()
    }

    /// Star with centre 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> SimplicialComplex2 {
        SimplicialComplex2::new(leaves + 1, (1..=leaves).map(|i| [0, i]).collect(), vec![])
            .unwrap()
    }

    /// Cycle graph on `n >= 3` vertices, no triangles filled.
    pub fn ring(n: usize) -> SimplicialComplex2 {
        SimplicialComplex2::from_unsorted(n, (0..n).map(|i| (i, (i + 1) % n)), []).unwrap()
    }

    /// Two hollow triangles sharing the edge (1,2): 4 vertices, 5 edges.
    pub fn two_triangles_sharing_edge() -> SimplicialComplex2 {
        SimplicialComplex2::new(4, vec![[0, 1], [0, 2], [1, 2], [1, 3], [2, 3]], vec![]).unwrap()
    }

    /// Two hollow triangles glued at vertex 2.
    pub fn figure_eight() -> SimplicialComplex2 {
        SimplicialComplex2::new(
            5,
            vec![[0, 1], [0, 2], [1, 2], [2, 3], [2, 4], [3, 4]],
            vec![],
        )
        .unwrap()
    }

    /// Square 0-1-2-3 with diagonal (0,2) and both triangles filled.
    pub fn filled_square() -> SimplicialComplex2 {
        SimplicialComplex2::new(
            4,
            vec![[0, 1], [0, 2], [0, 3], [1, 2], [2, 3]],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap()
    }

    /// Annulus: outer square 0..3, inner square 4..7, the band between them
    /// triangulated, the inner square left empty. One hole.
    pub fn annulus() -> SimplicialComplex2 {
        let mut edges = Vec::new();
        let mut tris = Vec::new();
        for i in 0..4 {
            let (o, o2) = (i, (i + 1) % 4);
            let (n, n2) = (4 + i, 4 + (i + 1) % 4);
            edges.push((o, o2));
            edges.push((n, n2));
            edges.push((o, n));
            edges.push((o2, n));
            tris.push((o, o2, n));
            tris.push((o2, n, n2));
        }
        SimplicialComplex2::from_unsorted(8, edges, tris).unwrap()
    }

    /// 4x4 vertex grid whose two outer cells in the middle row are holes.
    pub fn grid_with_two_holes() -> SimplicialComplex2 {
        grid_with_holes(4, 4, &[(0, 1), (2, 1)])
    }

    /// `w x h` vertex grid, every unit cell split along its diagonal into two
    /// filled triangles, except the cells listed in `holes` (by lower-left
    /// corner) which keep only their four sides.
    pub fn grid_with_holes(w: usize, h: usize, holes: &[(usize, usize)]) -> SimplicialComplex2 {
        let id = |x: usize, y: usize| y * w + x;
        let mut edges = Vec::new();
        let mut tris = Vec::new();
        for y in 0..h {
            for x in 0..w {
                if x + 1 < w {
                    edges.push((id(x, y), id(x + 1, y)));
                }
                if y + 1 < h {
                    edges.push((id(x, y), id(x, y + 1)));
                }
                if x + 1 < w && y + 1 < h {
                    let (a, b, c, d) = (id(x, y), id(x + 1, y), id(x, y + 1), id(x + 1, y + 1));
                    if !holes.contains(&(x, y)) {
                        edges.push((a, d));
                        tris.push((a, b, d));
                        tris.push((a, c, d));
                    }
                }
            }
        }
        SimplicialComplex2::from_unsorted(w * h, edges, tris).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unsorted_and_duplicate_edges() {
        let e = SimplicialComplex2::new(3, vec![[0, 2], [0, 1]], vec![]);
        assert_eq!(e.unwrap_err(), ComplexError::Unsorted { kind: "edge", index: 1 });
        let e = SimplicialComplex2::new(2, vec![[0, 1], [0, 1]], vec![]);
        assert_eq!(e.unwrap_err(), ComplexError::Duplicate { kind: "edge", index: 1 });
    }

    #[test]
    fn rejects_bad_vertices() {
        let e = SimplicialComplex2::new(2, vec![[0, 2]], vec![]);
        assert!(matches!(e, Err(ComplexError::VertexOutOfRange { vertex: 2, .. })));
        let e = SimplicialComplex2::new(2, vec![[1, 1]], vec![]);
        assert!(matches!(e, Err(ComplexError::Degenerate { .. })));
    }

    #[test]
    fn rejects_open_triangle() {
        let e = SimplicialComplex2::new(3, vec![[0, 1], [1, 2]], vec![[0, 1, 2]]);
        assert_eq!(
            e.unwrap_err(),
            ComplexError::ClosureViolation { triangle: [0, 1, 2], missing: [0, 2] }
        );
    }

    #[test]
    fn rejects_disconnected() {
        let e = SimplicialComplex2::new(4, vec![[0, 1], [2, 3]], vec![]);
        assert_eq!(e.unwrap_err(), ComplexError::Disconnected { components: 2 });
    }

    #[test]
    fn flag_complex_fills_cliques() {
        let k = SimplicialComplex2::flag_from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3), (1, 3)])
            .unwrap();
        assert_eq!(k.triangles(), &[[0, 1, 2], [1, 2, 3]]);
        assert!(k.upper_adjacent(k.edge_id(0, 1).unwrap(), k.edge_id(1, 2).unwrap()));
        assert!(!k.upper_adjacent(k.edge_id(0, 1).unwrap(), k.edge_id(2, 3).unwrap()));
        assert_eq!(k.upper_degree(k.edge_id(1, 2).unwrap()), 2);
    }

    #[test]
    fn fixtures_are_valid() {
        assert_eq!(fixtures::annulus().edge_count(), 16);
        assert_eq!(fixtures::annulus().triangle_count(), 8);
        let g = fixtures::grid_with_two_holes();
        assert_eq!(g.vertex_count(), 16);
        assert_eq!(g.triangle_count(), 14);
    }
}
