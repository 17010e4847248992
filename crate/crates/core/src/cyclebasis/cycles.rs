use serde::{Deserialize, Serialize};

use super::{CycleBasisError, SpanningTree};
use crate::complex::{SimplicialComplex2, SparseChain};

/// Fundamental cycle of one non-tree edge together with its harmonic data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleRecord {
    pub nontree_edge: usize,
    /// Endpoints `(a, b)`, `a < b`, of the non-tree edge.
    pub terminals: (usize, usize),
    pub chain: SparseChain,
    /// Integrals of the label harmonics; the first is the primary one.
    pub integrals: Vec<f64>,
    /// `|integrals[0]|`.
    pub label: f64,
    /// Edges on the closed walk root -> a -> b -> root: `hop(a) + hop(b) + 1`.
    /// The terminals can evaluate it from their own hop counts.
    pub hop_length: usize,
}

impl CycleRecord {
    pub fn integral(&self) -> f64 {
        self.integrals[0]
    }

    /// Ordering key for representative selection.
    pub fn selection_key(&self) -> (usize, usize) {
        (self.hop_length, self.nontree_edge)
    }
}

/// The cycle closed by non-tree edge `e = (a, b)`: `a -> b` along `e`, then
/// back through the tree via the lowest common ancestor. The tree segments
/// above the ancestor cancel, so the chain equals the root-path cycle.
pub fn cycle_from_nontree_edge(
    k: &SimplicialComplex2,
    t: &SpanningTree,
    e: usize,
) -> Result<SparseChain, CycleBasisError> {
    if t.is_tree_edge(e) {
        return Err(CycleBasisError::EdgeInTree { edge: e });
    }
    let [a, b] = k.edge(e);
    let mut entries = vec![(e, 1i64)];
    let (mut down, mut up) = (a, b);
    while down != up {
        if t.hop(up) >= t.hop(down) {
            // b side, walked towards the root
            let p = t.parent(up).expect("non-root has a parent");
            entries.push((t.parent_edge(up).unwrap(), if up < p { 1 } else { -1 }));
            up = p;
        } else {
            // a side, walked away from the root
            let p = t.parent(down).expect("non-root has a parent");
            entries.push((t.parent_edge(down).unwrap(), if p < down { 1 } else { -1 }));
            down = p;
        }
    }
    Ok(SparseChain::from_entries(entries))
}

/// Root-path hop length of the cycle closed by `e`.
pub fn root_path_length(k: &SimplicialComplex2, t: &SpanningTree, e: usize) -> usize {
    let [a, b] = k.edge(e);
    t.hop(a) + t.hop(b) + 1
}

/// Signed contribution of the tree edge above `child` when walking from
/// its parent down to it.
#[inline]
pub fn downward_term(parent: usize, child: usize, y_edge: f64) -> f64 {
    if child > parent {
        y_edge
    } else {
        -y_edge
    }
}

/// `f(v) = <y, path root -> v>`, filled top-down as `f(parent) + term`.
pub fn integral_function(k: &SimplicialComplex2, t: &SpanningTree, y: &[f64]) -> Vec<f64> {
    assert_eq!(y.len(), k.edge_count(), "harmonic length must equal |E|");
    let mut f = vec![0.0; t.vertex_count()];
    for &v in t.top_down() {
        if let Some(p) = t.parent(v) {
            let e = t.parent_edge(v).unwrap();
            f[v] = f[p] + downward_term(p, v, y[e]);
        }
    }
    f
}

/// `<y, cycle(e)> = f(a) + y(e) - f(b)` for `e = (a, b)`.
#[inline]
pub fn cycle_integral(f: &[f64], y: &[f64], k: &SimplicialComplex2, e: usize) -> f64 {
    let [a, b] = k.edge(e);
    edge_cycle_integral(f[a], y[e], f[b])
}

#[inline]
pub fn edge_cycle_integral(f_low: f64, y_edge: f64, f_high: f64) -> f64 {
    f_low + y_edge - f_high
}

/// One record per non-tree edge, with integrals of every harmonic in
/// `label_harmonics` (at least one).
pub fn build_cycle_records(
    k: &SimplicialComplex2,
    t: &SpanningTree,
    label_harmonics: &[Vec<f64>],
) -> Vec<CycleRecord> {
    assert!(!label_harmonics.is_empty(), "at least one label harmonic is needed");
    let fs: Vec<Vec<f64>> = label_harmonics.iter().map(|y| integral_function(k, t, y)).collect();
    t.non_tree_edges()
        .into_iter()
        .map(|e| {
            let integrals: Vec<f64> = fs
                .iter()
                .zip(label_harmonics)
                .map(|(f, y)| cycle_integral(f, y, k, e))
                .collect();
            let [a, b] = k.edge(e);
            CycleRecord {
                nontree_edge: e,
                terminals: (a, b),
                chain: cycle_from_nontree_edge(k, t, e).expect("non-tree edge"),
                label: integrals[0].abs(),
                integrals,
                hop_length: root_path_length(k, t, e),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::fixtures;
    use crate::cyclebasis::spanning_tree_bfs;

    #[test]
    fn hollow_triangle_cycle() {
        let k = fixtures::hollow_triangle();
        let t = spanning_tree_bfs(&k, 2).unwrap();
        let c = cycle_from_nontree_edge(&k, &t, 0).unwrap();
        assert_eq!(c.to_dense(3), vec![1.0, -1.0, 1.0]);
        assert!(c.is_cycle(&k));
        assert_eq!(
            cycle_from_nontree_edge(&k, &t, 1),
            Err(CycleBasisError::EdgeInTree { edge: 1 })
        );
    }

    #[test]
    fn edge_below_common_parent_gives_triangle() {
        let k = fixtures::star(3);
        let k = SimplicialComplex2::from_unsorted(
            4,
            k.edges().iter().map(|&[a, b]| (a, b)).chain([(1, 2)]),
            [],
        )
        .unwrap();
        let t = spanning_tree_bfs(&k, 0).unwrap();
        let e = k.edge_id(1, 2).unwrap();
        let c = cycle_from_nontree_edge(&k, &t, e).unwrap();
        assert_eq!(c.support_len(), 3);
        assert!(c.is_cycle(&k));
    }

    #[test]
    fn integral_function_signs() {
        let k = fixtures::hollow_triangle();
        let t = spanning_tree_bfs(&k, 2).unwrap();
        let s = 1.0 / 3f64.sqrt();
        let y = [s, -s, s];
        let f = integral_function(&k, &t, &y);
        assert_eq!(f[2], 0.0);
        assert_eq!(f[0], s); // -y(0,2)
        assert_eq!(f[1], -s); // -y(1,2)
        let i = cycle_integral(&f, &y, &k, 0);
        assert!((i - 3f64.sqrt()).abs() < 1e-12);
        assert!(integral_function(&k, &t, &[0.0; 3]).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn root_path_lengths() {
        let k = fixtures::hollow_triangle();
        let t = spanning_tree_bfs(&k, 2).unwrap();
        assert_eq!(root_path_length(&k, &t, 0), 3);
    }
}
