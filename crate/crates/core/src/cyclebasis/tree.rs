use std::collections::VecDeque;

use super::CycleBasisError;
use crate::complex::SimplicialComplex2;

/// Rooted spanning tree of the 1-skeleton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanningTree {
    root: usize,
    parent: Vec<Option<usize>>,
    parent_edge: Vec<Option<usize>>,
    hop: Vec<usize>,
    children: Vec<Vec<usize>>,
    is_tree_edge: Vec<bool>,
    // vertices by (hop, id): parents always precede children
    top_down: Vec<usize>,
}

impl SpanningTree {
    /// Builds a tree from a parent map and checks that it spans `k`:
    /// exactly the root lacks a parent, every parent link is an edge, and
    /// every vertex reaches the root.
    pub fn from_parents(
        k: &SimplicialComplex2,
        root: usize,
        parent: Vec<Option<usize>>,
    ) -> Result<Self, CycleBasisError> {
        let n = k.vertex_count();
        if root >= n || parent.len() != n || parent[root].is_some() {
            return Err(CycleBasisError::InvalidTree(format!("bad root {root}")));
        }
        let mut children = vec![Vec::new(); n];
        let mut parent_edge = vec![None; n];
        let mut is_tree_edge = vec![false; k.edge_count()];
        for v in 0..n {
            if v == root {
                continue;
            }
            let p = parent[v].ok_or_else(|| CycleBasisError::InvalidTree(format!("vertex {v} has no parent")))?;
            let e = k
                .edge_id(v, p)
                .ok_or_else(|| CycleBasisError::InvalidTree(format!("{v}-{p} is not an edge")))?;
            children[p].push(v);
            parent_edge[v] = Some(e);
            is_tree_edge[e] = true;
        }
        let mut hop = vec![usize::MAX; n];
        hop[root] = 0;
        let mut queue = VecDeque::from([root]);
        let mut reached = 1;
        while let Some(u) = queue.pop_front() {
            for &c in &children[u] {
                hop[c] = hop[u] + 1;
                reached += 1;
                queue.push_back(c);
            }
        }
        if reached != n {
            return Err(CycleBasisError::InvalidTree("parent links contain a cycle".into()));
        }
        let mut top_down: Vec<usize> = (0..n).collect();
        top_down.sort_by_key(|&v| (hop[v], v));
        Ok(Self { root, parent, parent_edge, hop, children, is_tree_edge, top_down })
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    /// Tree edge joining `v` to its parent.
    pub fn parent_edge(&self, v: usize) -> Option<usize> {
        self.parent_edge[v]
    }

    pub fn hop(&self, v: usize) -> usize {
        self.hop[v]
    }

    pub fn hops(&self) -> &[usize] {
        &self.hop
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn is_tree_edge(&self, e: usize) -> bool {
        self.is_tree_edge[e]
    }

    pub fn tree_edges(&self) -> Vec<usize> {
        (0..self.is_tree_edge.len()).filter(|&e| self.is_tree_edge[e]).collect()
    }

    pub fn non_tree_edges(&self) -> Vec<usize> {
        (0..self.is_tree_edge.len()).filter(|&e| !self.is_tree_edge[e]).collect()
    }

    pub fn top_down(&self) -> &[usize] {
        &self.top_down
    }

    pub fn vertex_count(&self) -> usize {
        self.parent.len()
    }
}

/// Breadth-first tree: `hop` is the graph distance to `root`, and each
/// vertex hangs off its smallest-id neighbour one level closer.
pub fn spanning_tree_bfs(k: &SimplicialComplex2, root: usize) -> Result<SpanningTree, CycleBasisError> {
    let n = k.vertex_count();
    if root >= n {
        return Err(CycleBasisError::InvalidRoot { root, vertex_count: n });
    }
    let mut dist = vec![usize::MAX; n];
    dist[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &w in k.neighbors(u) {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    let parent = (0..n)
        .map(|v| {
            if v == root {
                None
            } else {
                // neighbours are ascending, so the first hit is the smallest id
                k.neighbors(v).iter().copied().find(|&u| dist[u] + 1 == dist[v])
            }
        })
        .collect();
    SpanningTree::from_parents(k, root, parent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::fixtures;

    #[test]
    fn path_from_end() {
        let k = fixtures::path(3);
        let t = spanning_tree_bfs(&k, 2).unwrap();
        assert_eq!(t.parents(), &[Some(1), Some(2), None]);
        assert_eq!(t.hops(), &[2, 1, 0]);
    }

    #[test]
    fn hollow_triangle_from_max_vertex() {
        let k = fixtures::hollow_triangle();
        let t = spanning_tree_bfs(&k, 2).unwrap();
        let tree: Vec<[usize; 2]> = t.tree_edges().iter().map(|&e| k.edge(e)).collect();
        assert_eq!(tree, vec![[0, 2], [1, 2]]);
        let rest: Vec<[usize; 2]> = t.non_tree_edges().iter().map(|&e| k.edge(e)).collect();
        assert_eq!(rest, vec![[0, 1]]);
    }

    #[test]
    fn star_from_centre() {
        let k = fixtures::star(4);
        let t = spanning_tree_bfs(&k, 0).unwrap();
        assert!((1..=4).all(|v| t.parent(v) == Some(0) && t.hop(v) == 1));
        assert_eq!(t.children(0), &[1, 2, 3, 4]);
    }

    #[test]
    fn tie_break_prefers_smallest_parent() {
        // 0 and 1 both neighbour 3 at distance 1 from root 2
        let k = SimplicialComplex2::new(4, vec![[0, 2], [0, 3], [1, 2], [1, 3]], vec![]).unwrap();
        let t = spanning_tree_bfs(&k, 2).unwrap();
        assert_eq!(t.parent(3), Some(0));
        assert_eq!(t.tree_edges().len(), 3);
    }

    #[test]
    fn rejects_bad_parent_maps() {
        let k = fixtures::hollow_triangle();
        assert!(SpanningTree::from_parents(&k, 2, vec![Some(1), Some(0), None]).is_err());
        assert!(SpanningTree::from_parents(&k, 2, vec![None, Some(2), None]).is_err());
        assert!(matches!(spanning_tree_bfs(&k, 3), Err(CycleBasisError::InvalidRoot { .. })));
    }
}
