use super::{Dest, Message, NetsimError, Outbox, Payload, Phase, Protocol, Simulator};

/// Max-flooding: announce the own value, re-announce on every improvement.
struct MaxGossip {
    phase: Phase,
    local_max: Vec<f64>,
}

impl Protocol for MaxGossip {
    fn on_message(&mut self, node: usize, msg: &Message, out: &mut Outbox) {
        if let Payload::MaxGossip { value } = msg.payload {
            if value > self.local_max[node] {
                self.local_max[node] = value;
                out.broadcast(self.phase, Payload::MaxGossip { value });
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GossipOutcome {
    /// Final `local_max` of every node.
    pub local_max: Vec<f64>,
    pub value: f64,
    /// Transmissions beyond each node's initial announcement.
    pub improvement_broadcasts: u64,
}

/// Runs max-gossip over `initial` (one value per node) until quiescent.
/// Nodes announce in id order at the current time.
pub fn run_max_gossip(sim: &mut Simulator, phase: Phase, initial: &[f64]) -> Result<GossipOutcome, NetsimError> {
    assert_eq!(initial.len(), sim.node_count(), "one value per node");
    let before = sim.cost().phase_total(phase).broadcasts;
    for (v, &x) in initial.iter().enumerate() {
        sim.send(v, Dest::Broadcast, phase, Payload::MaxGossip { value: x });
    }
    let mut proto = MaxGossip { phase, local_max: initial.to_vec() };
    sim.run(&mut proto)?;
    let value = proto.local_max.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if proto.local_max.iter().any(|&m| m != value) {
        return Err(NetsimError::Protocol("max-gossip ended without agreement".into()));
    }
    let sent = sim.cost().phase_total(phase).broadcasts - before;
    Ok(GossipOutcome { local_max: proto.local_max, value, improvement_broadcasts: sent - initial.len() as u64 })
}
