use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::Phase;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeCost {
    /// Packets transmitted; a broadcast is one transmission.
    pub broadcasts: u64,
    pub packets_received: u64,
    pub payload_floats: u64,
}

impl NodeCost {
    fn add(&mut self, o: &NodeCost) {
        self.broadcasts += o.broadcasts;
        self.packets_received += o.packets_received;
        self.payload_floats += o.payload_floats;
    }
}

/// Per-phase, per-node packet counters.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    // [phase][node]
    entries: Vec<Vec<NodeCost>>,
}

impl CostReport {
    pub fn new() -> Self {
        Self::default()
    }

    fn slot(&mut self, phase: Phase, node: usize) -> &mut NodeCost {
        let p = phase as usize;
        if self.entries.len() <= p {
            self.entries.resize(Phase::ALL.len(), Vec::new());
        }
        let row = &mut self.entries[p];
        if row.len() <= node {
            row.resize(node + 1, NodeCost::default());
        }
        &mut row[node]
    }

    fn row(&self, phase: Phase) -> &[NodeCost] {
        self.entries.get(phase as usize).map_or(&[], |r| r.as_slice())
    }

    pub fn record_send(&mut self, phase: Phase, node: usize, packets: u64, floats: u64) {
        let c = self.slot(phase, node);
        c.broadcasts += packets;
        c.payload_floats += floats;
    }

    pub fn record_receive(&mut self, phase: Phase, node: usize, packets: u64) {
        self.slot(phase, node).packets_received += packets;
    }

    /// Moves counts of `node` from phase `from` to phase `to`.
    pub fn reassign(&mut self, from: Phase, to: Phase, node: usize, moved: NodeCost) {
        if moved == NodeCost::default() {
            return;
        }
        let src = self.slot(from, node);
        assert!(
            src.broadcasts >= moved.broadcasts
                && src.packets_received >= moved.packets_received
                && src.payload_floats >= moved.payload_floats,
            "reassigning more than was recorded"
        );
        src.broadcasts -= moved.broadcasts;
        src.packets_received -= moved.packets_received;
        src.payload_floats -= moved.payload_floats;
        self.slot(to, node).add(&moved);
    }

    pub fn get(&self, phase: Phase, node: usize) -> NodeCost {
        self.row(phase).get(node).copied().unwrap_or_default()
    }

    pub fn phase_total(&self, phase: Phase) -> NodeCost {
        let mut t = NodeCost::default();
        self.row(phase).iter().for_each(|c| t.add(c));
        t
    }

    /// Largest per-node transmission count in `phase`.
    pub fn phase_max_broadcasts(&self, phase: Phase) -> u64 {
        self.row(phase).iter().map(|c| c.broadcasts).max().unwrap_or(0)
    }

    /// Nodes with any transmission in `phase`.
    pub fn active_nodes(&self, phase: Phase) -> usize {
        self.row(phase).iter().filter(|c| c.broadcasts > 0).count()
    }

    pub fn totals(&self) -> NodeCost {
        let mut t = NodeCost::default();
        self.entries.iter().flatten().for_each(|c| t.add(c));
        t
    }

    pub fn messages_total(&self) -> u64 {
        self.totals().broadcasts
    }

    /// Phases with any recorded traffic.
    pub fn phases(&self) -> Vec<Phase> {
        Phase::ALL
            .into_iter()
            .filter(|&p| self.row(p).iter().any(|c| *c != NodeCost::default()))
            .collect()
    }

    pub fn merge(&mut self, other: &CostReport) {
        for p in Phase::ALL {
            for (node, c) in other.row(p).iter().enumerate() {
                self.slot(p, node).add(c);
            }
        }
    }

    /// `phase,node_id,broadcasts,packets_received,payload_floats`, rows in
    /// phase order then node order; all-zero rows are left out.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("phase,node_id,broadcasts,packets_received,payload_floats\n");
        for p in Phase::ALL {
            for (node, c) in self.row(p).iter().enumerate() {
                if *c == NodeCost::default() {
                    continue;
                }
                writeln!(s, "{},{},{},{},{}", p.as_str(), node, c.broadcasts, c.packets_received, c.payload_floats)
                    .unwrap();
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn totals_and_reassign() {
        let mut c = CostReport::new();
        c.record_send(Phase::Harmonic, 1, 3, 3);
        c.record_send(Phase::Harmonic, 2, 1, 1);
        c.record_receive(Phase::Harmonic, 2, 3);
        assert_eq!(c.phase_total(Phase::Harmonic).broadcasts, 4);
        assert_eq!(c.phase_max_broadcasts(Phase::Harmonic), 3);
        c.reassign(Phase::Harmonic, Phase::HarmonicOverrun, 1, NodeCost { broadcasts: 1, packets_received: 0, payload_floats: 1 });
        assert_eq!(c.get(Phase::Harmonic, 1).broadcasts, 2);
        assert_eq!(c.get(Phase::HarmonicOverrun, 1).broadcasts, 1);
        assert_eq!(c.messages_total(), 4);
    }

    #[test]
    fn csv_layout() {
        let mut c = CostReport::new();
        c.record_send(Phase::Tree, 0, 1, 0);
        c.record_receive(Phase::GossipRoot, 1, 2);
        let csv = c.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "phase,node_id,broadcasts,packets_received,payload_floats");
        assert_eq!(lines[1], "gossip-root,1,0,2,0");
        assert_eq!(lines[2], "tree,0,1,0,0");
    }
}
