use std::collections::BTreeSet;

use super::{Dest, Message, NetsimError, Outbox, Payload, Phase, Protocol, ReportEntry, Simulator};
use crate::cyclebasis::labels_match;

fn key(e: &ReportEntry) -> (usize, (usize, usize)) {
    // terminals order like edge ids
    (e.hop_length, e.terminals)
}

/// One representative per label cluster, smallest `(hop_length, edge)`
/// first. Mirrors the centralized clustering, so repeating it on partial
/// sets up the tree yields the same final choice.
pub fn select_representatives(mut entries: Vec<ReportEntry>, label_tol: f64) -> Vec<ReportEntry> {
    entries.sort_by(|x, y| x.label.total_cmp(&y.label).then_with(|| key(x).cmp(&key(y))));
    let mut clusters: Vec<(Vec<f64>, ReportEntry)> = Vec::new();
    for e in entries {
        match clusters.iter_mut().rev().find(|(anchor, _)| labels_match(anchor, &e.integrals, label_tol)) {
            Some((_, best)) => {
                if key(&e) < key(best) {
                    *best = e;
                }
            }
            None => clusters.push((e.integrals.clone(), e)),
        }
    }
    let mut reps: Vec<ReportEntry> = clusters.into_iter().map(|(_, e)| e).collect();
    reps.sort_by_key(key);
    reps
}

/// Tells neighbours which of the sender's non-tree edges are
/// non-contractible, so their lower endpoints learn they are terminal.
struct ClassifyProto {
    terminal: Vec<bool>,
}

impl Protocol for ClassifyProto {
    fn on_message(&mut self, v: usize, msg: &Message, _: &mut Outbox) {
        if let Payload::Classification { noncontractible } = &msg.payload {
            if noncontractible.contains(&v) {
                self.terminal[v] = true;
            }
        }
    }
}

/// `own[v]` lists the lower endpoints of v's non-contractible non-tree
/// edges. Returns the terminal flag of every node.
pub fn run_classification(sim: &mut Simulator, own: &[Vec<usize>]) -> Result<Vec<bool>, NetsimError> {
    let mut proto = ClassifyProto { terminal: own.iter().map(|o| !o.is_empty()).collect() };
    for (v, list) in own.iter().enumerate() {
        if !list.is_empty() {
            sim.send(v, Dest::Broadcast, Phase::Classify, Payload::Classification { noncontractible: list.clone() });
        }
    }
    sim.run(&mut proto)?;
    Ok(proto.terminal)
}

struct SelectProto<'a> {
    parent: &'a [Option<usize>],
    children: Vec<Vec<usize>>,
    terminal: &'a [bool],
    label_tol: f64,
    pending: Vec<usize>,
    collected: Vec<Vec<ReportEntry>>,
    surviving_children: Vec<BTreeSet<usize>>,
    survives: Vec<bool>,
    result: Option<Vec<ReportEntry>>,
    error: Option<String>,
}

impl SelectProto<'_> {
    fn finish(&mut self, v: usize, out: &mut Outbox) {
        let records = std::mem::take(&mut self.collected[v]);
        let Some(p) = self.parent[v] else {
            self.survives[v] = self.terminal[v] || !self.surviving_children[v].is_empty();
            self.result = Some(select_representatives(records, self.label_tol));
            return;
        };
        if !self.terminal[v] && self.surviving_children[v].is_empty() {
            if !records.is_empty() {
                self.error.get_or_insert(format!("node {v} would prune with {} records", records.len()));
            }
            out.send(p, Phase::Prune, Payload::PruneNotice { leaf: v });
            return;
        }
        self.survives[v] = true;
        let reps = select_representatives(records, self.label_tol);
        if reps.is_empty() {
            out.send(p, Phase::Select, Payload::CycleReport { entry: None, done: true });
        }
        let last = reps.len().saturating_sub(1);
        for (i, e) in reps.into_iter().enumerate() {
            out.send(p, Phase::Select, Payload::CycleReport { entry: Some(e), done: i == last });
        }
    }

    fn child_done(&mut self, v: usize, out: &mut Outbox) {
        self.pending[v] -= 1;
        if self.pending[v] == 0 {
            self.finish(v, out);
        }
    }
}

impl Protocol for SelectProto<'_> {
    fn on_message(&mut self, v: usize, msg: &Message, out: &mut Outbox) {
        if !self.children[v].contains(&msg.src) {
            return;
        }
        match &msg.payload {
            Payload::PruneNotice { .. } => self.child_done(v, out),
            Payload::CycleReport { entry, done } => {
                self.surviving_children[v].insert(msg.src);
                if let Some(e) = entry {
                    self.collected[v].push(e.clone());
                }
                if *done {
                    self.child_done(v, out);
                }
            }
            _ => {}
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelectOutcome {
    /// Representatives gathered at the root, in selection order.
    pub p: Vec<ReportEntry>,
    pub survives: Vec<bool>,
    /// Children that were not pruned.
    pub surviving_children: Vec<Vec<usize>>,
}

/// Prune-and-select convergecast. Leaves start; a node waits for every
/// child, then either prunes itself (no surviving child and not terminal)
/// or forwards one representative per label cluster among its own and its
/// children's records.
pub fn run_prune_and_select(
    sim: &mut Simulator,
    root: usize,
    parent: &[Option<usize>],
    children: &[Vec<usize>],
    terminal: &[bool],
    records: Vec<Vec<ReportEntry>>,
    label_tol: f64,
) -> Result<SelectOutcome, NetsimError> {
    let n = sim.node_count();
    let mut proto = SelectProto {
        parent,
        children: children.to_vec(),
        terminal,
        label_tol,
        pending: children.iter().map(Vec::len).collect(),
        collected: records,
        surviving_children: vec![BTreeSet::new(); n],
        survives: vec![false; n],
        result: None,
        error: None,
    };
    let mut out = Outbox::default();
    for v in 0..n {
        if children[v].is_empty() {
            proto.finish(v, &mut out);
            sim.flush(v, &mut out);
        }
    }
    sim.run(&mut proto)?;
    if let Some(e) = proto.error {
        return Err(NetsimError::Protocol(e));
    }
    let p = proto.result.ok_or_else(|| NetsimError::Protocol(format!("root {root} never heard from all children")))?;
    let surviving_children: Vec<Vec<usize>> = proto.surviving_children.into_iter().map(|s| s.into_iter().collect()).collect();
    // after pruning every leaf must be terminal
    for v in 0..n {
        if proto.survives[v] && surviving_children[v].is_empty() && !terminal[v] && v != root {
            return Err(NetsimError::Protocol(format!("surviving leaf {v} is not terminal")));
        }
    }
    Ok(SelectOutcome { p, survives: proto.survives, surviving_children })
}

struct AnnounceProto<'a> {
    parent: &'a [Option<usize>],
    children: &'a [Vec<usize>],
    terminal: &'a [bool],
    surviving_children: &'a [Vec<usize>],
    received: Vec<bool>,
    final_root: Option<usize>,
}

impl AnnounceProto<'_> {
    /// Who takes the root role after `v`, if `v` currently holds it.
    fn handoff(&mut self, v: usize) -> Option<usize> {
        match self.surviving_children[v].as_slice() {
            [only] if !self.terminal[v] => Some(*only),
            _ => {
                self.final_root = Some(v);
                None
            }
        }
    }
}

impl Protocol for AnnounceProto<'_> {
    fn on_message(&mut self, v: usize, msg: &Message, out: &mut Outbox) {
        let Payload::PAnnounce { p, new_root } = &msg.payload else { return };
        if self.parent[v] != Some(msg.src) || self.received[v] {
            return;
        }
        self.received[v] = true;
        let next = if *new_root == Some(v) { self.handoff(v) } else { None };
        if !self.children[v].is_empty() {
            out.broadcast(Phase::Announce, Payload::PAnnounce { p: p.clone(), new_root: next });
        }
    }
}

/// Broadcasts `P` down the whole tree. A root that is not terminal and has
/// a single surviving child hands its role to that child, repeatedly.
/// Returns the final root.
pub fn run_announce(
    sim: &mut Simulator,
    root: usize,
    parent: &[Option<usize>],
    children: &[Vec<usize>],
    terminal: &[bool],
    surviving_children: &[Vec<usize>],
    p: &[ReportEntry],
) -> Result<usize, NetsimError> {
    let n = sim.node_count();
    let mut proto = AnnounceProto {
        parent,
        children,
        terminal,
        surviving_children,
        received: vec![false; n],
        final_root: None,
    };
    proto.received[root] = true;
    let next = proto.handoff(root);
    if !children[root].is_empty() {
        sim.send(root, Dest::Broadcast, Phase::Announce, Payload::PAnnounce { p: p.to_vec(), new_root: next });
    }
    sim.run(&mut proto)?;
    if proto.received.iter().any(|r| !r) {
        return Err(NetsimError::Protocol("P did not reach every node".into()));
    }
    proto.final_root.ok_or_else(|| NetsimError::Protocol("root handoff did not settle".into()))
}
