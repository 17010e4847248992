use std::collections::BTreeSet;

use super::{Dest, Message, NetsimError, Outbox, Payload, Phase, Protocol, Simulator};
use crate::complex::SimplicialComplex2;
use crate::cyclebasis::SpanningTree;

struct TreeBuild {
    hop: Vec<usize>,
    parent: Vec<Option<usize>>,
    children: Vec<BTreeSet<usize>>,
}

impl Protocol for TreeBuild {
    fn on_message(&mut self, node: usize, msg: &Message, out: &mut Outbox) {
        match msg.payload {
            Payload::TreeProbe { origin, hop } if hop < self.hop[node] => {
                let old = self.parent[node].replace(origin);
                self.hop[node] = hop;
                out.broadcast(Phase::Tree, Payload::TreeProbe { origin: node, hop: hop + 1 });
                out.send(origin, Phase::TreeAck, Payload::ChildAck { child: node });
                if let Some(p) = old {
                    if p != origin {
                        out.send(p, Phase::TreeAck, Payload::ChildRetract { child: node });
                    }
                }
            }
            Payload::ChildAck { child } => {
                self.children[node].insert(child);
            }
            Payload::ChildRetract { child } => {
                self.children[node].remove(&child);
            }
            _ => {}
        }
    }
}

/// Flooded hop-count tree from `root`: a node adopts the sender of the
/// first probe with a smaller hop count, acknowledges it and retracts from
/// its previous parent.
pub fn run_spanning_tree(sim: &mut Simulator, k: &SimplicialComplex2, root: usize) -> Result<SpanningTree, NetsimError> {
    let n = sim.node_count();
    let mut proto = TreeBuild { hop: vec![usize::MAX; n], parent: vec![None; n], children: vec![BTreeSet::new(); n] };
    proto.hop[root] = 0;
    sim.send(root, Dest::Broadcast, Phase::Tree, Payload::TreeProbe { origin: root, hop: 1 });
    sim.run(&mut proto)?;
    let tree = SpanningTree::from_parents(k, root, proto.parent)?;
    for v in 0..n {
        let local: Vec<usize> = proto.children[v].iter().copied().collect();
        let mut expected = tree.children(v).to_vec();
        expected.sort_unstable();
        if local != expected || tree.hop(v) != proto.hop[v] {
            return Err(NetsimError::Protocol(format!("node {v} holds an inconsistent tree view")));
        }
    }
    Ok(tree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::fixtures;
    use crate::cyclebasis::spanning_tree_bfs;
    use crate::netsim::{network_of, SimConfig};

    #[test]
    fn synchronous_tree_is_the_bfs_tree() {
        for k in [fixtures::annulus(), fixtures::grid_with_two_holes(), fixtures::figure_eight()] {
            let root = k.vertex_count() - 1;
            let mut sim = Simulator::new(network_of(&k), SimConfig::default()).unwrap();
            let t = run_spanning_tree(&mut sim, &k, root).unwrap();
            assert_eq!(t, spanning_tree_bfs(&k, root).unwrap());
            assert_eq!(sim.cost().phase_total(Phase::Tree).broadcasts, k.vertex_count() as u64);
        }
    }

    #[test]
    fn star_from_centre() {
        let k = fixtures::star(5);
        let mut sim = Simulator::new(network_of(&k), SimConfig::default()).unwrap();
        let t = run_spanning_tree(&mut sim, &k, 0).unwrap();
        assert!((1..=5).all(|v| t.parent(v) == Some(0)));
    }

    #[test]
    fn async_tree_is_valid_and_repeatable() {
        let k = fixtures::grid_with_two_holes();
        let run = || {
            let mut sim = Simulator::new(network_of(&k), SimConfig::asynchronous(11, 6)).unwrap();
            run_spanning_tree(&mut sim, &k, 0).unwrap()
        };
        let a = run();
        assert_eq!(a, run());
        assert_eq!(a.tree_edges().len(), k.vertex_count() - 1);
    }
}
