use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use super::{CostReport, NetsimError};
use crate::rng::SplitMix64;

/// Protocol phase tag; orders rows of the cost report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Phase {
    GossipRoot,
    Tree,
    TreeAck,
    GossipDelta,
    Harmonic,
    HarmonicRelay,
    Termination,
    HarmonicOverrun,
    Integral,
    Classify,
    Prune,
    Select,
    Announce,
    IntegralPruned,
    Reduce,
}

impl Phase {
    pub const ALL: [Phase; 15] = [
        Phase::GossipRoot,
        Phase::Tree,
        Phase::TreeAck,
        Phase::GossipDelta,
        Phase::Harmonic,
        Phase::HarmonicRelay,
        Phase::Termination,
        Phase::HarmonicOverrun,
        Phase::Integral,
        Phase::Classify,
        Phase::Prune,
        Phase::Select,
        Phase::Announce,
        Phase::IntegralPruned,
        Phase::Reduce,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Phase::GossipRoot => "gossip-root",
            Phase::Tree => "tree",
            Phase::TreeAck => "tree-ack",
            Phase::GossipDelta => "gossip-delta",
            Phase::Harmonic => "harmonic",
            Phase::HarmonicRelay => "harmonic-relay",
            Phase::Termination => "termination",
            Phase::HarmonicOverrun => "harmonic-overrun",
            Phase::Integral => "integral",
            Phase::Classify => "classify",
            Phase::Prune => "prune",
            Phase::Select => "select",
            Phase::Announce => "p-broadcast",
            Phase::IntegralPruned => "integral-pruned",
            Phase::Reduce => "integral-reduce",
        }
    }

    /// Phases whose messages repeat every harmonic iteration.
    pub fn is_per_iteration(self) -> bool {
        matches!(self, Phase::Harmonic | Phase::HarmonicRelay | Phase::Termination | Phase::HarmonicOverrun)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dest {
    Node(usize),
    Broadcast,
}

/// Cycle data carried up the tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub terminals: (usize, usize),
    pub label: f64,
    pub hop_length: usize,
    pub integrals: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Converged,
    MaxIterations,
    Diverged,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Payload {
    MaxGossip { value: f64 },
    TreeProbe { origin: usize, hop: usize },
    ChildAck { child: usize },
    ChildRetract { child: usize },
    /// Values of the sender's own edges at `iteration`; one packet per edge.
    HarmonicY { harmonic: usize, iteration: usize, values: Vec<f64> },
    /// Forwarded neighbour-edge values for two-hop rows.
    HarmonicRelay { harmonic: usize, iteration: usize, values: Vec<f64> },
    /// Subtree maxima of `|y_j - y_{j-1}|` and sums of `y_j^2` for
    /// `j = first_iteration..`.
    ResidualUp { harmonic: usize, first_iteration: usize, max_abs_delta: Vec<f64>, sum_sq: Vec<f64> },
    TerminateBroadcast { harmonic: usize, iteration: usize, outcome: Outcome, norm: f64 },
    IntegralDown { sender: usize, harmonic: usize, f_value: f64 },
    /// Non-contractible non-tree edges owned by the sender.
    Classification { noncontractible: Vec<usize> },
    CycleReport { entry: Option<ReportEntry>, done: bool },
    PruneNotice { leaf: usize },
    /// `P` in selection order; `new_root` names the child taking over the
    /// root role, if any.
    PAnnounce { p: Vec<ReportEntry>, new_root: Option<usize> },
    /// Integrals of the later harmonics over column `column` of `P`.
    IntegralColumn { column: Option<usize>, values: Vec<f64>, done: bool },
}

impl Payload {
    /// Protocol packets this transmission stands for.
    pub fn packets(&self) -> u64 {
        match self {
            Payload::HarmonicY { values, .. } => values.len() as u64,
            _ => 1,
        }
    }

    pub fn floats(&self) -> u64 {
        match self {
            Payload::MaxGossip { .. } | Payload::IntegralDown { .. } | Payload::TerminateBroadcast { .. } => 1,
            Payload::HarmonicY { values, .. } | Payload::HarmonicRelay { values, .. } => values.len() as u64,
            Payload::ResidualUp { max_abs_delta, sum_sq, .. } => (max_abs_delta.len() + sum_sq.len()) as u64,
            Payload::CycleReport { entry: Some(e), .. } => 1 + e.integrals.len() as u64,
            Payload::PAnnounce { p, .. } => p.iter().map(|e| 1 + e.integrals.len() as u64).sum(),
            Payload::IntegralColumn { values, .. } => values.len() as u64,
            _ => 0,
        }
    }
}

impl fmt::Display for Payload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Payload::MaxGossip { value } => write!(f, "max={value}"),
            Payload::TreeProbe { origin, hop } => write!(f, "probe origin={origin} hop={hop}"),
            Payload::ChildAck { child } => write!(f, "child={child}"),
            Payload::ChildRetract { child } => write!(f, "retract child={child}"),
            Payload::HarmonicY { harmonic, iteration, values } => {
                write!(f, "h={harmonic} k={iteration} y={values:?}")
            }
            Payload::HarmonicRelay { harmonic, iteration, values } => {
                write!(f, "h={harmonic} k={iteration} relay={values:?}")
            }
            Payload::ResidualUp { harmonic, first_iteration, max_abs_delta, .. } => {
                write!(f, "h={harmonic} from={first_iteration} residual={max_abs_delta:?}")
            }
            Payload::TerminateBroadcast { harmonic, iteration, outcome, norm } => {
                write!(f, "h={harmonic} stop k={iteration} {outcome:?} norm={norm}")
            }
            Payload::IntegralDown { sender, harmonic, f_value } => write!(f, "h={harmonic} f({sender})={f_value}"),
            Payload::Classification { noncontractible } => write!(f, "noncontractible={noncontractible:?}"),
            Payload::CycleReport { entry: Some(e), done } => write!(
                f,
                "cycle {}-{} label={} hop={} done={done}",
                e.terminals.0, e.terminals.1, e.label, e.hop_length
            ),
            Payload::CycleReport { entry: None, done } => write!(f, "empty done={done}"),
            Payload::PruneNotice { leaf } => write!(f, "prune {leaf}"),
            Payload::PAnnounce { p, new_root } => {
                let t: Vec<(usize, usize)> = p.iter().map(|e| e.terminals).collect();
                write!(f, "P={t:?} new_root={new_root:?}")
            }
            Payload::IntegralColumn { column: Some(c), values, done } => write!(f, "column {c} {values:?} done={done}"),
            Payload::IntegralColumn { column: None, done, .. } => write!(f, "empty done={done}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Message {
    pub src: usize,
    pub dst: Dest,
    pub phase: Phase,
    pub payload: Payload,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheduling {
    /// Every transmission arrives exactly one time unit later.
    Synchronous,
    /// Per-delivery delays uniform on `1..=delay_spread`, drawn from `seed`;
    /// each link stays FIFO.
    Async { seed: u64, delay_spread: u64 },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TranscriptLevel {
    #[default]
    Off,
    /// All messages except the per-iteration harmonic traffic.
    Info,
    Debug,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub scheduling: Scheduling,
    /// Iterations covered by one residual convergecast message.
    pub residual_period: usize,
    pub transcript: TranscriptLevel,
    /// Deliveries after which a phase counts as non-quiescent.
    pub max_events: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self { scheduling: Scheduling::Synchronous, residual_period: 8, transcript: TranscriptLevel::Off, max_events: 2_000_000_000 }
    }
}

impl SimConfig {
    pub fn asynchronous(seed: u64, delay_spread: u64) -> Self {
        Self { scheduling: Scheduling::Async { seed, delay_spread }, ..Self::default() }
    }

    pub fn max_delay(&self) -> u64 {
        match self.scheduling {
            Scheduling::Synchronous => 1,
            Scheduling::Async { delay_spread, .. } => delay_spread.max(1),
        }
    }

    pub fn validate(&self) -> Result<(), NetsimError> {
        if self.residual_period == 0 {
            return Err(NetsimError::InvalidConfig("residual period must be positive".into()));
        }
        if let Scheduling::Async { delay_spread: 0, .. } = self.scheduling {
            return Err(NetsimError::InvalidConfig("delay spread must be positive".into()));
        }
        Ok(())
    }
}

/// Sends queued by a handler; they leave at the current time.
#[derive(Debug, Default)]
pub struct Outbox {
    msgs: Vec<(Dest, Phase, Payload)>,
}

impl Outbox {
    pub fn send(&mut self, dst: usize, phase: Phase, payload: Payload) {
        self.msgs.push((Dest::Node(dst), phase, payload));
    }

    pub fn broadcast(&mut self, phase: Phase, payload: Payload) {
        self.msgs.push((Dest::Broadcast, phase, payload));
    }
}

/// Node programs of one protocol.
pub trait Protocol {
    fn on_message(&mut self, node: usize, msg: &Message, out: &mut Outbox);
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Key {
    time: u64,
    src: usize,
    seq: u64,
    // usize::MAX: every neighbour of `src`
    dst: usize,
}

#[derive(Debug)]
struct Event {
    key: Key,
    msg: Rc<Message>,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key.cmp(&other.key)
    }
}

/// Single-threaded discrete-event network over fixed adjacency lists.
pub struct Simulator {
    neighbors: Vec<Vec<usize>>,
    cfg: SimConfig,
    now: u64,
    seq: u64,
    queue: BinaryHeap<Reverse<Event>>,
    // last arrival time per (node, neighbour index); async only
    link_clock: Vec<Vec<u64>>,
    delays: SplitMix64,
    cost: CostReport,
    transcript: Vec<String>,
    sent_deliveries: u64,
    delivered: u64,
}

impl Simulator {
    pub fn new(neighbors: Vec<Vec<usize>>, cfg: SimConfig) -> Result<Self, NetsimError> {
        cfg.validate()?;
        let seed = match cfg.scheduling {
            Scheduling::Async { seed, .. } => seed,
            Scheduling::Synchronous => 0,
        };
        Ok(Self {
            neighbors,
            cfg,
            now: 0,
            seq: 0,
            queue: BinaryHeap::new(),
            link_clock: Vec::new(),
            delays: SplitMix64::new(seed),
            cost: CostReport::new(),
            transcript: Vec::new(),
            sent_deliveries: 0,
            delivered: 0,
        })
    }

    pub fn node_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn now(&self) -> u64 {
        self.now
    }

    pub fn cost(&self) -> &CostReport {
        &self.cost
    }

    pub fn cost_mut(&mut self) -> &mut CostReport {
        &mut self.cost
    }

    pub fn transcript(&self) -> &[String] {
        &self.transcript
    }

    pub fn take_transcript(&mut self) -> Vec<String> {
        std::mem::take(&mut self.transcript)
    }

    /// `(deliveries scheduled, deliveries made)`; equal once quiescent.
    pub fn delivery_counts(&self) -> (u64, u64) {
        (self.sent_deliveries, self.delivered)
    }

    fn delay(&mut self) -> u64 {
        match self.cfg.scheduling {
            Scheduling::Synchronous => 1,
            Scheduling::Async { delay_spread, .. } => 1 + self.delays.next_below(delay_spread),
        }
    }

    fn arrival(&mut self, src: usize, idx: usize) -> u64 {
        let t = self.now + self.delay();
        if self.link_clock.is_empty() {
            self.link_clock = self.neighbors.iter().map(|nb| vec![0; nb.len()]).collect();
        }
        let clock = &mut self.link_clock[src][idx];
        // FIFO: never overtake an earlier packet on the same link
        let t = t.max(*clock);
        *clock = t;
        t
    }

    /// Transmits from `src` at the current time.
    pub fn send(&mut self, src: usize, dst: Dest, phase: Phase, payload: Payload) {
        if let Dest::Node(d) = dst {
            assert!(self.neighbors[src].binary_search(&d).is_ok(), "{src} may only send to neighbours");
        }
        self.cost.record_send(phase, src, payload.packets(), payload.floats());
        let level = self.cfg.transcript;
        if level == TranscriptLevel::Debug || (level == TranscriptLevel::Info && !phase.is_per_iteration()) {
            let to = match dst {
                Dest::Node(d) => d.to_string(),
                Dest::Broadcast => "*".to_string(),
            };
            self.transcript.push(format!("t={} {}->{} {} {}", self.now, src, to, phase, payload));
        }
        let seq = self.seq;
        self.seq += 1;
        let msg = Rc::new(Message { src, dst, phase, payload });
        match (self.cfg.scheduling, dst) {
            (Scheduling::Synchronous, Dest::Broadcast) => {
                let fan = self.neighbors[src].len() as u64;
                if fan == 0 {
                    return;
                }
                self.sent_deliveries += fan;
                // one event fans out to every neighbour at the same instant;
                // with unit delays the queue order alone keeps links FIFO
                let time = self.now + 1;
                self.queue.push(Reverse(Event { key: Key { time, src, seq, dst: usize::MAX }, msg }));
            }
            (Scheduling::Synchronous, Dest::Node(d)) => {
                self.sent_deliveries += 1;
                let time = self.now + 1;
                self.queue.push(Reverse(Event { key: Key { time, src, seq, dst: d }, msg }));
            }
            (Scheduling::Async { .. }, Dest::Node(d)) => {
                self.sent_deliveries += 1;
                let idx = self.neighbors[src].binary_search(&d).expect("neighbour");
                let time = self.arrival(src, idx);
                self.queue.push(Reverse(Event { key: Key { time, src, seq, dst: d }, msg }));
            }
            (Scheduling::Async { .. }, Dest::Broadcast) => {
                for idx in 0..self.neighbors[src].len() {
                    let d = self.neighbors[src][idx];
                    self.sent_deliveries += 1;
                    let time = self.arrival(src, idx);
                    self.queue.push(Reverse(Event { key: Key { time, src, seq, dst: d }, msg: Rc::clone(&msg) }));
                }
            }
        }
    }

    /// Sends everything queued in `out` from `node`.
    pub fn flush(&mut self, node: usize, out: &mut Outbox) {
        for (dst, phase, payload) in out.msgs.drain(..) {
            self.send(node, dst, phase, payload);
        }
    }

    /// Delivers events until the queue drains.
    pub fn run<P: Protocol>(&mut self, proto: &mut P) -> Result<(), NetsimError> {
        let mut out = Outbox::default();
        let mut events: u64 = 0;
        while let Some(Reverse(Event { key, msg })) = self.queue.pop() {
            self.now = key.time;
            let packets = msg.payload.packets();
            if key.dst == usize::MAX {
                for i in 0..self.neighbors[key.src].len() {
                    let d = self.neighbors[key.src][i];
                    self.deliver(proto, d, &msg, packets, &mut out);
                }
            } else {
                self.deliver(proto, key.dst, &msg, packets, &mut out);
            }
            events += 1;
            if events > self.cfg.max_events {
                return Err(NetsimError::NonQuiescent { events });
            }
        }
        Ok(())
    }

    fn deliver<P: Protocol>(&mut self, proto: &mut P, d: usize, msg: &Message, packets: u64, out: &mut Outbox) {
        self.delivered += 1;
        self.cost.record_receive(msg.phase, d, packets);
        proto.on_message(d, msg, out);
        self.flush(d, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Echo {
        got: Vec<(u64, usize, usize)>,
    }

    impl Protocol for Echo {
        fn on_message(&mut self, node: usize, msg: &Message, _out: &mut Outbox) {
            self.got.push((0, msg.src, node));
        }
    }

    fn path3() -> Vec<Vec<usize>> {
        vec![vec![1], vec![0, 2], vec![1]]
    }

    #[test]
    fn broadcast_is_one_transmission() {
        let mut sim = Simulator::new(path3(), SimConfig::default()).unwrap();
        sim.send(1, Dest::Broadcast, Phase::Tree, Payload::TreeProbe { origin: 1, hop: 1 });
        let mut p = Echo { got: vec![] };
        sim.run(&mut p).unwrap();
        assert_eq!(p.got.len(), 2);
        assert_eq!(sim.cost().get(Phase::Tree, 1).broadcasts, 1);
        assert_eq!(sim.cost().phase_total(Phase::Tree).packets_received, 2);
        assert_eq!(sim.delivery_counts(), (2, 2));
        assert_eq!(sim.now(), 1);
    }

    #[test]
    fn async_links_stay_fifo() {
        struct Order(Vec<f64>);
        impl Protocol for Order {
            fn on_message(&mut self, _n: usize, msg: &Message, _o: &mut Outbox) {
                if let Payload::MaxGossip { value } = msg.payload {
                    self.0.push(value);
                }
            }
        }
        let mut sim = Simulator::new(path3(), SimConfig::asynchronous(9, 7)).unwrap();
        for i in 0..50 {
            sim.send(0, Dest::Node(1), Phase::GossipRoot, Payload::MaxGossip { value: i as f64 });
        }
        let mut o = Order(vec![]);
        sim.run(&mut o).unwrap();
        assert_eq!(o.0, (0..50).map(|i| i as f64).collect::<Vec<_>>());
    }

    #[test]
    fn transcript_format() {
        let cfg = SimConfig { transcript: TranscriptLevel::Debug, ..SimConfig::default() };
        let mut sim = Simulator::new(path3(), cfg).unwrap();
        sim.send(0, Dest::Node(1), Phase::TreeAck, Payload::ChildAck { child: 0 });
        sim.send(2, Dest::Broadcast, Phase::GossipRoot, Payload::MaxGossip { value: 2.0 });
        assert_eq!(sim.transcript(), &["t=0 0->1 tree-ack child=0", "t=0 2->* gossip-root max=2"]);
    }
}
