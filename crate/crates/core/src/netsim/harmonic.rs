use std::collections::VecDeque;

use super::cost::NodeCost;
use super::{Message, NetsimError, Outbox, Outcome, Payload, Phase, Protocol, Simulator};
use crate::complex::{row_dot, Laplacian1, SimplicialComplex2};
use crate::cyclebasis::SpanningTree;
use crate::harmonic::{edge_update, initial_value, HarmonicConfig, HarmonicError, HarmonicResult};

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug)]
enum Src {
    Own(u32),
    Need(u32),
}

/// Static per-node tables for emulating every edge on its higher endpoint.
/// Built from the two-hop neighbourhood each node is assumed to know.
#[derive(Clone, Debug)]
pub struct EdgeEmulation {
    /// Edges owned by each node, ascending.
    pub owned: Vec<Vec<usize>>,
    /// Foreign edges each node needs for its rows, ascending.
    needed: Vec<Vec<usize>>,
    /// Edges each node forwards every iteration: its incident edges owned by
    /// a neighbour that some other neighbour cannot hear directly.
    relay: Vec<Vec<usize>>,
    /// `[node][neighbour index][position in neighbour's bundle]` ->
    /// (needed slot, relay slot).
    bundle_map: Vec<Vec<Vec<(u32, u32)>>>,
    /// `[node][neighbour index][position in neighbour's relay]` -> needed slot.
    relay_map: Vec<Vec<Vec<u32>>>,
    /// `[node][owned position]`: where each row entry's value comes from.
    row_src: Vec<Vec<Vec<Src>>>,
    /// Per-iteration signals an owner waits for before stepping: a bundle
    /// from every owning neighbour and a relay from every relaying one.
    /// This keeps neighbours within one iteration of each other.
    pace: Vec<usize>,
}

impl EdgeEmulation {
    pub fn new(k: &SimplicialComplex2, l: &Laplacian1) -> Self {
        let n = k.vertex_count();
        let owner = |e: usize| k.edge(e)[1];
        let adjacent = |a: usize, b: usize| a == b || k.neighbors(a).binary_search(&b).is_ok();
        let mut owned = vec![Vec::new(); n];
        for e in 0..k.edge_count() {
            owned[owner(e)].push(e);
        }
        let mut needed = vec![Vec::new(); n];
        let mut relay = vec![Vec::new(); n];
        for b in 0..n {
            for &e in &owned[b] {
                for &(f, _) in l.row(e) {
                    let o = owner(f);
                    if o == b {
                        continue;
                    }
                    needed[b].push(f);
                    if !adjacent(o, b) {
                        // f shares with e the vertex adjacent to b
                        let [a, _] = k.edge(e);
                        debug_assert!(k.edge(f).contains(&a));
                        relay[a].push(f);
                    }
                }
            }
        }
        for v in needed.iter_mut().chain(relay.iter_mut()) {
            v.sort_unstable();
            v.dedup();
        }
        let slot = |list: &[usize], e: usize| list.binary_search(&e).map_or(NONE, |i| i as u32);
        let mut bundle_map = Vec::with_capacity(n);
        let mut relay_map = Vec::with_capacity(n);
        let mut row_src = Vec::with_capacity(n);
        for b in 0..n {
            let mut bm = Vec::new();
            let mut rm = Vec::new();
            for &u in k.neighbors(b) {
                bm.push(owned[u].iter().map(|&f| (slot(&needed[b], f), slot(&relay[b], f))).collect());
                rm.push(
                    relay[u]
                        .iter()
                        .map(|&f| if adjacent(owner(f), b) { NONE } else { slot(&needed[b], f) })
                        .collect(),
                );
            }
            bundle_map.push(bm);
            relay_map.push(rm);
            row_src.push(
                owned[b]
                    .iter()
                    .map(|&e| {
                        l.row(e)
                            .iter()
                            .map(|&(f, _)| match owned[b].binary_search(&f) {
                                Ok(i) => Src::Own(i as u32),
                                Err(_) => Src::Need(slot(&needed[b], f)),
                            })
                            .collect()
                    })
                    .collect(),
            );
        }
        let pace = (0..n)
            .map(|b| k.neighbors(b).iter().map(|&u| usize::from(!owned[u].is_empty()) + usize::from(!relay[u].is_empty())).sum())
            .collect();
        Self { owned, needed, relay, bundle_map, relay_map, row_src, pace }
    }

    pub fn owned_count(&self, v: usize) -> usize {
        self.owned[v].len()
    }
}

#[derive(Clone, Debug)]
struct IterBuf {
    need: Vec<f64>,
    need_have: usize,
    relay: Vec<f64>,
    relay_have: usize,
    relayed: bool,
    pace_have: usize,
}

impl IterBuf {
    fn reset(&mut self, relayed: bool) {
        self.need.fill(0.0);
        self.relay.fill(0.0);
        self.need_have = 0;
        self.relay_have = 0;
        self.pace_have = 0;
        self.relayed = relayed;
    }
}

/// Buffers of consecutive iterations starting at `base`; finished ones are
/// recycled.
#[derive(Clone, Debug, Default)]
struct Bufs {
    base: usize,
    q: VecDeque<IterBuf>,
    pool: Vec<IterBuf>,
}

impl Bufs {
    fn get(&self, it: usize) -> Option<&IterBuf> {
        it.checked_sub(self.base).and_then(|i| self.q.get(i))
    }

    fn get_mut(&mut self, it: usize) -> Option<&mut IterBuf> {
        it.checked_sub(self.base).and_then(|i| self.q.get_mut(i))
    }

    fn entry(&mut self, it: usize, nn: usize, nr: usize) -> &mut IterBuf {
        assert!(it >= self.base, "iteration {it} already retired");
        while self.base + self.q.len() <= it {
            let b = match self.pool.pop() {
                Some(mut b) => {
                    b.reset(nr == 0);
                    b
                }
                None => IterBuf {
                    need: vec![0.0; nn],
                    need_have: 0,
                    relay: vec![0.0; nr],
                    relay_have: 0,
                    relayed: nr == 0,
                    pace_have: 0,
                },
            };
            self.q.push_back(b);
        }
        &mut self.q[it - self.base]
    }

    fn retire_while(&mut self, done: impl Fn(usize, &IterBuf) -> bool) {
        while let Some(front) = self.q.front() {
            if !done(self.base, front) {
                break;
            }
            let b = self.q.pop_front().unwrap();
            self.pool.push(b);
            self.base += 1;
        }
    }

    fn clear(&mut self) {
        self.pool.extend(self.q.drain(..));
    }
}

#[derive(Clone, Debug)]
struct NodeRun {
    k: usize,
    y: Vec<f64>,
    bufs: Bufs,
    snapshots: VecDeque<(usize, Vec<f64>)>,
    // own (max |dy|, sum y^2) for iterations not yet reported
    own_stats: VecDeque<(f64, f64)>,
    // block -> (children reported, maxima, sums)
    // children's blocks from next_block on: (reports, maxima, sums)
    child_acc: VecDeque<(usize, Vec<f64>, Vec<f64>)>,
    next_block: usize,
    // last bundle iteration heard from each owning neighbour
    heard: Vec<Option<usize>>,
    last_bundle: Option<usize>,
    last_relay: Option<usize>,
    stopped: bool,
    quiet: bool,
    parked: bool,
}

struct HarmonicProto<'a> {
    em: &'a EdgeEmulation,
    l: &'a Laplacian1,
    neighbors: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
    child_count: Vec<usize>,
    h: usize,
    seed: u64,
    delta: f64,
    cap: usize,
    period: usize,
    threshold: f64,
    window: usize,
    nodes: Vec<NodeRun>,
    decision: Option<(usize, Outcome, f64, f64)>,
    error: Option<NetsimError>,
}

impl<'a> HarmonicProto<'a> {
    fn block_end(&self, b: usize) -> usize {
        ((b + 1) * self.period).min(self.cap)
    }

    fn progress(&self, v: usize) -> usize {
        if !self.em.owned[v].is_empty() {
            return self.nodes[v].k;
        }
        // non-owners follow their neighbours' broadcasts
        self.nodes[v].heard.iter().flatten().copied().min().unwrap_or(self.cap)
    }

    fn buf(&mut self, v: usize, it: usize) -> &mut IterBuf {
        let (nn, nr) = (self.em.needed[v].len(), self.em.relay[v].len());
        self.nodes[v].bufs.entry(it, nn, nr)
    }

    fn start(&mut self, v: usize, out: &mut Outbox) {
        let seed_values: Vec<f64> = self.em.owned[v].iter().map(|&e| initial_value(self.seed, e)).collect();
        self.nodes[v].y = seed_values.clone();
        self.nodes[v].snapshots.push_back((0, seed_values.clone()));
        if !seed_values.is_empty() {
            self.nodes[v].last_bundle = Some(0);
            out.broadcast(Phase::Harmonic, Payload::HarmonicY { harmonic: self.h, iteration: 0, values: seed_values });
        }
        // only a lone owner can step without hearing anyone
        self.advance(v, out);
        self.try_report(v, out);
    }

    fn on_bundle(&mut self, v: usize, ui: usize, it: usize, values: &[f64], out: &mut Outbox) {
        self.nodes[v].heard[ui] = Some(it);
        let owner_done = self.em.owned[v].is_empty() || it < self.nodes[v].k || self.nodes[v].k >= self.cap;
        let relay_done = self.em.relay[v].is_empty() || self.nodes[v].last_relay.is_some_and(|r| it <= r);
        if !(owner_done && relay_done) {
            let em = self.em;
            let map = &em.bundle_map[v][ui];
            let b = self.buf(v, it);
            b.pace_have += 1;
            for (pos, &val) in values.iter().enumerate() {
                let (ns, rs) = map[pos];
                // every slot has exactly one source
                if ns != NONE {
                    b.need[ns as usize] = val;
                    b.need_have += 1;
                }
                if rs != NONE {
                    b.relay[rs as usize] = val;
                    b.relay_have += 1;
                }
            }
            self.try_relay(v, it, out);
        }
        self.advance(v, out);
        self.try_report(v, out);
    }

    fn on_relay(&mut self, v: usize, ui: usize, it: usize, values: &[f64], out: &mut Outbox) {
        if self.em.owned[v].is_empty() || it < self.nodes[v].k || self.nodes[v].k >= self.cap {
            return;
        }
        let em = self.em;
        let map = &em.relay_map[v][ui];
        let b = self.buf(v, it);
        b.pace_have += 1;
        for (pos, &val) in values.iter().enumerate() {
            let ns = map[pos];
            if ns != NONE {
                b.need[ns as usize] = val;
                b.need_have += 1;
            }
        }
        self.advance(v, out);
        self.try_report(v, out);
    }

    fn try_relay(&mut self, v: usize, it: usize, out: &mut Outbox) {
        let nr = self.em.relay[v].len();
        let Some(b) = self.nodes[v].bufs.get_mut(it) else { return };
        if b.relayed || b.relay_have < nr {
            return;
        }
        // relays go out in iteration order because bundles arrive in order
        b.relayed = true;
        let values = b.relay.clone();
        self.nodes[v].last_relay = Some(it);
        out.broadcast(Phase::HarmonicRelay, Payload::HarmonicRelay { harmonic: self.h, iteration: it, values });
        self.gc(v);
    }

    fn gc(&mut self, v: usize) {
        let node = &mut self.nodes[v];
        let (k, cap) = (node.k, self.cap);
        let owner = !self.em.owned[v].is_empty();
        node.bufs.retire_while(|it, b| b.relayed && (!owner || it < k || k >= cap));
    }

    /// Applies as many local iterations as the buffered values allow.
    fn advance(&mut self, v: usize, out: &mut Outbox) {
        if self.em.owned[v].is_empty() {
            return;
        }
        let nn = self.em.needed[v].len();
        let pace = self.em.pace[v];
        loop {
            let node = &self.nodes[v];
            if node.stopped || node.parked || node.k >= self.cap {
                return;
            }
            let k = node.k;
            let ready = (nn == 0 && pace == 0)
                || node.bufs.get(k).is_some_and(|b| b.need_have == nn && b.pace_have == pace);
            if !ready {
                return;
            }
            let empty: Vec<f64> = Vec::new();
            let need = node.bufs.get(k).map_or(&empty, |b| &b.need);
            let mut next = Vec::with_capacity(node.y.len());
            let mut max_update: f64 = 0.0;
            let mut sum_sq = 0.0;
            for (i, &e) in self.em.owned[v].iter().enumerate() {
                let src = &self.em.row_src[v][i];
                let row = self.l.row(e);
                let mut pos = 0;
                let prod = row_dot(row, |_| {
                    let val = match src[pos] {
                        Src::Own(j) => node.y[j as usize],
                        Src::Need(s) => need[s as usize],
                    };
                    pos += 1;
                    val
                });
                let val = edge_update(node.y[i], self.delta, prod);
                max_update = max_update.max((val - node.y[i]).abs());
                sum_sq += val * val;
                next.push(val);
            }
            let node = &mut self.nodes[v];
            node.k = k + 1;
            node.own_stats.push_back((max_update, sum_sq));
            // a node nobody paces owns every edge, so its own residual is
            // the global one; it still runs out the residual block so the
            // convergecast and non-owner neighbours see all of it
            if pace == 0 && !(max_update.is_finite() && max_update >= self.threshold) {
                node.quiet = true;
            }
            if node.quiet && (node.k % self.period == 0 || node.k >= self.cap) {
                node.parked = true;
            }
            let mut snap = if node.snapshots.len() >= self.window {
                node.snapshots.pop_front().unwrap().1
            } else {
                Vec::with_capacity(next.len())
            };
            snap.clear();
            snap.extend_from_slice(&next);
            node.snapshots.push_back((k + 1, snap));
            node.last_bundle = Some(k + 1);
            let values = next.clone();
            node.y = next;
            out.broadcast(Phase::Harmonic, Payload::HarmonicY { harmonic: self.h, iteration: k + 1, values });
            self.gc(v);
        }
    }

    fn try_report(&mut self, v: usize, out: &mut Outbox) {
        loop {
            if self.nodes[v].stopped || self.decision.is_some() && self.parent[v].is_none() {
                return;
            }
            let b = self.nodes[v].next_block;
            let start = b * self.period + 1;
            if start > self.cap {
                return;
            }
            let end = self.block_end(b);
            if self.progress(v) < end {
                return;
            }
            let children_in = self.nodes[v].child_acc.front().map_or(0, |c| c.0);
            if children_in < self.child_count[v] {
                return;
            }
            let len = end + 1 - start;
            let owner = !self.em.owned[v].is_empty();
            let node = &mut self.nodes[v];
            let (mut maxima, mut sums) = (vec![0.0f64; len], vec![0.0f64; len]);
            if owner {
                for j in 0..len {
                    let (m, s) = node.own_stats.pop_front().expect("own stats for reported block");
                    maxima[j] = m;
                    sums[j] = s;
                }
            }
            if let Some((_, cm, cs)) = node.child_acc.pop_front() {
                for j in 0..len {
                    maxima[j] = combine_max(maxima[j], cm[j]);
                    sums[j] += cs[j];
                }
            }
            node.next_block += 1;
            match self.parent[v] {
                Some(p) => out.send(
                    p,
                    Phase::Termination,
                    Payload::ResidualUp { harmonic: self.h, first_iteration: start, max_abs_delta: maxima, sum_sq: sums },
                ),
                None => {
                    if self.decide(start, end, &maxima, &sums) {
                        let (it, outcome, _, norm) = self.decision.unwrap();
                        self.finish(v, it);
                        out.broadcast(
                            Phase::Termination,
                            Payload::TerminateBroadcast { harmonic: self.h, iteration: it, outcome, norm },
                        );
                        return;
                    }
                }
            }
        }
    }

    /// Same stopping rule as the centralized loop, applied to the block.
    fn decide(&mut self, start: usize, end: usize, maxima: &[f64], sums: &[f64]) -> bool {
        for (j, (&m, &s)) in maxima.iter().zip(sums).enumerate() {
            let it = start + j;
            if !m.is_finite() {
                self.decision = Some((it, Outcome::Diverged, m, s.sqrt()));
                return true;
            }
            if m < self.threshold {
                self.decision = Some((it, Outcome::Converged, m, s.sqrt()));
                return true;
            }
        }
        if end == self.cap {
            self.decision = Some((end, Outcome::MaxIterations, maxima[maxima.len() - 1], sums[sums.len() - 1].sqrt()));
            return true;
        }
        false
    }

    fn finish(&mut self, v: usize, it: usize) {
        let node = &mut self.nodes[v];
        node.stopped = true;
        if self.em.owned[v].is_empty() {
            return;
        }
        if node.k != it {
            match node.snapshots.iter().find(|(j, _)| *j == it) {
                Some((_, y)) => node.y = y.clone(),
                None => {
                    self.error.get_or_insert(NetsimError::Protocol(format!(
                        "node {v} no longer holds iterate {it} (at {})",
                        node.k
                    )));
                }
            }
        }
        node.bufs.clear();
    }
}

fn combine_max(a: f64, b: f64) -> f64 {
    // an infinite residual must survive aggregation
    if !a.is_finite() || !b.is_finite() {
        f64::INFINITY
    } else {
        a.max(b)
    }
}

impl Protocol for HarmonicProto<'_> {
    fn on_message(&mut self, v: usize, msg: &Message, out: &mut Outbox) {
        if self.nodes[v].stopped {
            return;
        }
        let ui = || self.neighbors[v].binary_search(&msg.src).expect("sender is a neighbour");
        match &msg.payload {
            Payload::HarmonicY { harmonic, iteration, values } if *harmonic == self.h => {
                let i = ui();
                self.on_bundle(v, i, *iteration, values, out);
            }
            Payload::HarmonicRelay { harmonic, iteration, values } if *harmonic == self.h => {
                let i = ui();
                self.on_relay(v, i, *iteration, values, out);
            }
            Payload::ResidualUp { harmonic, first_iteration, max_abs_delta, sum_sq } if *harmonic == self.h => {
                let b = (first_iteration - 1) / self.period;
                let node = &mut self.nodes[v];
                let slot = b - node.next_block;
                while node.child_acc.len() <= slot {
                    node.child_acc.push_back((0, vec![0.0; max_abs_delta.len()], vec![0.0; sum_sq.len()]));
                }
                let entry = &mut node.child_acc[slot];
                entry.0 += 1;
                for j in 0..max_abs_delta.len() {
                    entry.1[j] = combine_max(entry.1[j], max_abs_delta[j]);
                    entry.2[j] += sum_sq[j];
                }
                self.try_report(v, out);
            }
            Payload::TerminateBroadcast { harmonic, iteration, outcome, norm }
                if *harmonic == self.h && self.parent[v] == Some(msg.src) =>
            {
                self.finish(v, *iteration);
                if self.child_count[v] > 0 {
                    out.broadcast(
                        Phase::Termination,
                        Payload::TerminateBroadcast { harmonic: self.h, iteration: *iteration, outcome: *outcome, norm: *norm },
                    );
                }
            }
            _ => {}
        }
    }
}

/// Outcome of one simulated harmonic computation.
#[derive(Clone, Debug, PartialEq)]
pub struct DistributedHarmonic {
    pub result: HarmonicResult,
    /// Euclidean norm of the final iterate, aggregated over the tree.
    pub norm: f64,
    /// Final value of each owned edge, per node.
    pub owned_values: Vec<Vec<f64>>,
}

/// Iterates `y <- y - delta L1 y` with every edge emulated on its higher
/// endpoint. Each iteration an owner broadcasts its edge values and a node
/// forwards the neighbour values its other neighbours cannot hear. Owners
/// run ahead optimistically; the residual convergecast lets the root find
/// the first converged iteration and broadcast it, and every owner then
/// falls back to that iterate.
pub fn run_distributed_harmonic(
    sim: &mut Simulator,
    em: &EdgeEmulation,
    l: &Laplacian1,
    tree: &SpanningTree,
    cfg: &HarmonicConfig,
    delta: f64,
    harmonic: usize,
) -> Result<DistributedHarmonic, NetsimError> {
    cfg.validate()?;
    let n = sim.node_count();
    let edges = l.dim();
    if edges == 0 {
        return Ok(DistributedHarmonic {
            result: HarmonicResult { y: Vec::new(), iterations: 0, delta_used: delta, final_update_norm: 0.0 },
            norm: 0.0,
            owned_values: vec![Vec::new(); n],
        });
    }
    let cap = cfg.max_iterations_for(edges);
    let period = sim.config().residual_period;
    let window = 2 * (n + 1) * sim.config().max_delay() as usize + n + 2 * period + 16;
    let neighbors: Vec<Vec<usize>> = (0..n).map(|v| sim.neighbors(v).to_vec()).collect();
    let nodes = (0..n)
        .map(|v| NodeRun {
            k: 0,
            y: Vec::new(),
            bufs: Bufs::default(),
            snapshots: VecDeque::new(),
            own_stats: VecDeque::new(),
            child_acc: VecDeque::new(),
            next_block: 0,
            heard: neighbors[v].iter().map(|&u| if em.owned[u].is_empty() { Some(usize::MAX) } else { None }).collect(),
            last_bundle: None,
            last_relay: None,
            stopped: false,
            quiet: false,
            parked: false,
        })
        .collect();
    let mut proto = HarmonicProto {
        em,
        l,
        parent: tree.parents().to_vec(),
        child_count: (0..n).map(|v| tree.children(v).len()).collect(),
        neighbors,
        h: harmonic,
        seed: cfg.seed,
        delta,
        cap,
        period,
        threshold: cfg.epsilon * delta,
        window,
        nodes,
        decision: None,
        error: None,
    };
    let mut out = Outbox::default();
    for v in 0..n {
        proto.start(v, &mut out);
        sim.flush(v, &mut out);
    }
    sim.run(&mut proto)?;
    if let Some(e) = proto.error.take() {
        return Err(e);
    }
    let Some((iterations, outcome, final_update_norm, norm)) = proto.decision else {
        return Err(NetsimError::Protocol("harmonic phase ended without a decision".into()));
    };
    if proto.nodes.iter().any(|s| !s.stopped) {
        return Err(NetsimError::Protocol("termination did not reach every node".into()));
    }

    let mut y = vec![0.0; edges];
    for v in 0..n {
        for (i, &e) in em.owned[v].iter().enumerate() {
            y[e] = proto.nodes[v].y[i];
        }
    }
    reassign_overrun(sim, em, &proto, iterations);
    let owned_values = proto.nodes.iter().map(|s| s.y.clone()).collect();
    let result = HarmonicResult { y, iterations, delta_used: delta, final_update_norm };
    match outcome {
        Outcome::Converged => Ok(DistributedHarmonic { result, norm, owned_values }),
        Outcome::MaxIterations => {
            Err(HarmonicError::MaxIterationsExceeded { partial: Box::new(result) }.into())
        }
        Outcome::Diverged => Err(HarmonicError::Diverged { partial: Box::new(result) }.into()),
    }
}

/// Moves traffic for iterations at or after the stopping iteration, sent
/// only because owners ran ahead, to its own phase.
fn reassign_overrun(sim: &mut Simulator, em: &EdgeEmulation, proto: &HarmonicProto, stop: usize) {
    let n = proto.nodes.len();
    let extra = |last: Option<usize>| last.map_or(0, |l| if l >= stop { (l - stop + 1) as u64 } else { 0 });
    let bundles: Vec<u64> = (0..n).map(|v| extra(proto.nodes[v].last_bundle) * em.owned[v].len() as u64).collect();
    let relays: Vec<u64> = (0..n).map(|v| extra(proto.nodes[v].last_relay)).collect();
    for v in 0..n {
        let recv_b: u64 = proto.neighbors[v].iter().map(|&u| bundles[u]).sum();
        let recv_r: u64 = proto.neighbors[v].iter().map(|&u| relays[u]).sum();
        let cost = sim.cost_mut();
        cost.reassign(
            Phase::Harmonic,
            Phase::HarmonicOverrun,
            v,
            NodeCost { broadcasts: bundles[v], packets_received: recv_b, payload_floats: bundles[v] },
        );
        let rf = relays[v] * em.relay[v].len() as u64;
        cost.reassign(
            Phase::HarmonicRelay,
            Phase::HarmonicOverrun,
            v,
            NodeCost { broadcasts: relays[v], packets_received: recv_r, payload_floats: rf },
        );
    }
}
