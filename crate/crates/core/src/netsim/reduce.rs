use super::{Message, NetsimError, Outbox, Payload, Phase, Protocol, Simulator};

struct ReduceProto<'a> {
    parent: &'a [Option<usize>],
    active: &'a [bool],
    children: &'a [Vec<usize>],
    pending: Vec<usize>,
    held: Vec<Vec<(usize, Vec<f64>)>>,
    at_root: Option<Vec<(usize, Vec<f64>)>>,
}

impl ReduceProto<'_> {
    fn finish(&mut self, v: usize, out: &mut Outbox) {
        let cols = std::mem::take(&mut self.held[v]);
        let Some(p) = self.parent[v] else {
            self.at_root = Some(cols);
            return;
        };
        if cols.is_empty() {
            out.send(p, Phase::Reduce, Payload::IntegralColumn { column: None, values: Vec::new(), done: true });
        }
        let last = cols.len().saturating_sub(1);
        for (i, (c, values)) in cols.into_iter().enumerate() {
            out.send(p, Phase::Reduce, Payload::IntegralColumn { column: Some(c), values, done: i == last });
        }
    }
}

impl Protocol for ReduceProto<'_> {
    fn on_message(&mut self, v: usize, msg: &Message, out: &mut Outbox) {
        let Payload::IntegralColumn { column, values, done } = &msg.payload else { return };
        if !self.active[v] || !self.children[v].contains(&msg.src) {
            return;
        }
        if let Some(c) = column {
            self.held[v].push((*c, values.clone()));
        }
        if *done {
            self.pending[v] -= 1;
            if self.pending[v] == 0 {
                self.finish(v, out);
            }
        }
    }
}

/// Convergecast of `P` columns to the root of the pruned tree. `columns[v]`
/// holds `(column index, integrals)` computed at node `v`; every active node
/// forwards one packet per column from its subtree, or one empty packet.
/// Returns the columns gathered at the root, sorted by index.
pub fn run_reduce_convergecast(
    sim: &mut Simulator,
    parent: &[Option<usize>],
    active: &[bool],
    children: &[Vec<usize>],
    columns: Vec<Vec<(usize, Vec<f64>)>>,
) -> Result<Vec<(usize, Vec<f64>)>, NetsimError> {
    let n = sim.node_count();
    let mut proto = ReduceProto {
        parent,
        active,
        children,
        pending: children.iter().map(Vec::len).collect(),
        held: columns,
        at_root: None,
    };
    let mut out = Outbox::default();
    for v in 0..n {
        if active[v] && children[v].is_empty() {
            proto.finish(v, &mut out);
            sim.flush(v, &mut out);
        }
    }
    sim.run(&mut proto)?;
    let mut cols = proto.at_root.ok_or_else(|| NetsimError::Protocol("reduction convergecast stalled".into()))?;
    cols.sort_by_key(|c| c.0);
    Ok(cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::fixtures;
    use crate::netsim::{network_of, SimConfig};

    #[test]
    fn columns_reach_the_root() {
        // path 0-1-2-3 rooted at 1, node 0 outside
        let k = fixtures::path(4);
        let parent = [None, None, Some(1), Some(2)];
        let active = [false, true, true, true];
        let children = vec![vec![], vec![2], vec![3], vec![]];
        let cols = vec![vec![], vec![(1, vec![0.5])], vec![], vec![(0, vec![1.5]), (2, vec![2.5])]];
        let mut sim = Simulator::new(network_of(&k), SimConfig::default()).unwrap();
        let got = run_reduce_convergecast(&mut sim, &parent, &active, &children, cols).unwrap();
        assert_eq!(got, vec![(0, vec![1.5]), (1, vec![0.5]), (2, vec![2.5])]);
        assert_eq!(sim.cost().get(Phase::Reduce, 3).broadcasts, 2);
        assert_eq!(sim.cost().get(Phase::Reduce, 2).broadcasts, 2);
        assert_eq!(sim.cost().get(Phase::Reduce, 1).broadcasts, 0);
    }
}
