use std::collections::BTreeMap;

use super::{Dest, Message, NetsimError, Outbox, Payload, Phase, Protocol, Simulator};
use crate::cyclebasis::downward_term;

/// Tree restricted to the nodes taking part in one integral phase.
#[derive(Clone, Debug)]
pub struct IntegralTree<'a> {
    pub root: usize,
    pub parent: &'a [Option<usize>],
    pub active: &'a [bool],
}

struct IntegralProto<'a> {
    tree: &'a IntegralTree<'a>,
    phase: Phase,
    harmonic: usize,
    /// y on each node's parent edge
    parent_y: &'a [f64],
    f: Vec<Option<f64>>,
    heard: Vec<BTreeMap<usize, f64>>,
}

impl Protocol for IntegralProto<'_> {
    fn on_message(&mut self, v: usize, msg: &Message, out: &mut Outbox) {
        let Payload::IntegralDown { sender, harmonic, f_value } = msg.payload else { return };
        if harmonic != self.harmonic {
            return;
        }
        self.heard[v].insert(sender, f_value);
        if !self.tree.active[v] || self.f[v].is_some() || self.tree.parent[v] != Some(sender) || v == self.tree.root {
            return;
        }
        let fv = f_value + downward_term(sender, v, self.parent_y[v]);
        self.f[v] = Some(fv);
        out.broadcast(self.phase, Payload::IntegralDown { sender: v, harmonic, f_value: fv });
    }
}

pub struct IntegralOutcome {
    pub f: Vec<Option<f64>>,
    /// Values each node heard from its neighbours.
    pub heard: Vec<BTreeMap<usize, f64>>,
}

/// Integral function on the active part of a tree: the root announces 0,
/// every other active node adds the signed value of its parent edge to its
/// parent's announcement and announces once.
pub fn run_integral_function(
    sim: &mut Simulator,
    tree: &IntegralTree,
    phase: Phase,
    harmonic: usize,
    parent_y: &[f64],
) -> Result<IntegralOutcome, NetsimError> {
    let n = sim.node_count();
    let mut proto = IntegralProto {
        tree,
        phase,
        harmonic,
        parent_y,
        f: vec![None; n],
        heard: vec![BTreeMap::new(); n],
    };
    proto.f[tree.root] = Some(0.0);
    sim.send(tree.root, Dest::Broadcast, phase, Payload::IntegralDown { sender: tree.root, harmonic, f_value: 0.0 });
    sim.run(&mut proto)?;
    if (0..n).any(|v| tree.active[v] != proto.f[v].is_some()) {
        return Err(NetsimError::Protocol("integral function did not reach every active node".into()));
    }
    Ok(IntegralOutcome { f: proto.f, heard: proto.heard })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::fixtures;
    use crate::cyclebasis::{integral_function, spanning_tree_bfs};
    use crate::harmonic::initial_vector;
    use crate::netsim::{network_of, SimConfig};

    fn parent_values(k: &crate::SimplicialComplex2, t: &crate::cyclebasis::SpanningTree, y: &[f64]) -> Vec<f64> {
        (0..k.vertex_count()).map(|v| t.parent_edge(v).map_or(0.0, |e| y[e])).collect()
    }

    #[test]
    fn matches_centralized_and_broadcasts_once() {
        let k = fixtures::grid_with_two_holes();
        let t = spanning_tree_bfs(&k, 5).unwrap();
        let y = initial_vector(k.edge_count(), 9);
        let active = vec![true; k.vertex_count()];
        let it = IntegralTree { root: 5, parent: t.parents(), active: &active };
        for cfg in [SimConfig::default(), SimConfig::asynchronous(3, 4)] {
            let mut sim = Simulator::new(network_of(&k), cfg).unwrap();
            let out = run_integral_function(&mut sim, &it, Phase::Integral, 0, &parent_values(&k, &t, &y)).unwrap();
            let f: Vec<f64> = out.f.iter().map(|x| x.unwrap()).collect();
            assert_eq!(f, integral_function(&k, &t, &y));
            assert_eq!(out.f[5], Some(0.0));
            for v in 0..k.vertex_count() {
                assert_eq!(sim.cost().get(Phase::Integral, v).broadcasts, 1);
            }
        }
    }

    #[test]
    fn sign_follows_orientation() {
        let k = fixtures::single_edge();
        let y = [0.75];
        for root in [0, 1] {
            let t = spanning_tree_bfs(&k, root).unwrap();
            let active = [true, true];
            let it = IntegralTree { root, parent: t.parents(), active: &active };
            let mut sim = Simulator::new(network_of(&k), SimConfig::default()).unwrap();
            let out = run_integral_function(&mut sim, &it, Phase::Integral, 0, &parent_values(&k, &t, &y)).unwrap();
            // walking 0 -> 1 follows the edge, 1 -> 0 opposes it
            let other = 1 - root;
            assert_eq!(out.f[other], Some(if root == 0 { 0.75 } else { -0.75 }));
        }
    }

    #[test]
    fn inactive_nodes_stay_silent() {
        let k = fixtures::path(4);
        let t = spanning_tree_bfs(&k, 1).unwrap();
        let active = [false, true, true, true];
        let it = IntegralTree { root: 1, parent: t.parents(), active: &active };
        let mut sim = Simulator::new(network_of(&k), SimConfig::default()).unwrap();
        let out = run_integral_function(&mut sim, &it, Phase::IntegralPruned, 2, &[0.0, 0.0, 1.0, 2.0]).unwrap();
        assert_eq!(out.f, vec![None, Some(0.0), Some(1.0), Some(3.0)]);
        assert_eq!(sim.cost().active_nodes(Phase::IntegralPruned), 3);
        assert_eq!(out.heard[0].get(&1), Some(&0.0));
    }
}
