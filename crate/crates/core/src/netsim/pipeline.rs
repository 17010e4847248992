use super::harmonic::{run_distributed_harmonic, EdgeEmulation};
use super::integral::{run_integral_function, IntegralTree};
use super::reduce::run_reduce_convergecast;
use super::select::{run_announce, run_classification, run_prune_and_select};
use super::{
    network_of, run_max_gossip, run_spanning_tree, CostReport, NetsimError, Phase, ReportEntry, Scheduling, SimConfig,
    Simulator,
};
use crate::complex::{build_laplacian_combinatorial, SimplicialComplex2};
use crate::cyclebasis::{
    cycle_from_nontree_edge, edge_cycle_integral, reduce_matrix, spanning_tree_bfs, CycleRecord, GeneratorSet,
    PipelineConfig, ResultJson, RootChoice, SpanningTree,
};
use crate::harmonic::HarmonicResult;

/// Everything a simulated run produced, plus its packet accounting.
#[derive(Clone, Debug)]
pub struct DistributedOutput {
    pub tree: SpanningTree,
    /// Root after the handoff along single-child chains.
    pub final_root: usize,
    pub delta: f64,
    pub harmonics: Vec<HarmonicResult>,
    /// Norms of the harmonics as aggregated over the tree.
    pub norms: Vec<f64>,
    /// Non-tree edges classified non-contractible, ascending.
    pub noncontractible: Vec<usize>,
    pub terminal: Vec<bool>,
    /// Nodes of the pruned tree below the final root.
    pub active: Vec<bool>,
    pub generators: GeneratorSet,
    pub cost: CostReport,
    pub transcript: Vec<String>,
    /// Improvement broadcasts of the root and step-size gossip.
    pub gossip_improvements: Vec<(Phase, u64)>,
    /// Label harmonics evaluated on the full tree.
    pub label_harmonics_run: usize,
    pub owned_edges: Vec<usize>,
    /// Iterations over every harmonic computed, including discarded ones.
    pub iterations_run: usize,
    pub scheduling: Scheduling,
}

impl DistributedOutput {
    pub fn iterations(&self) -> Vec<usize> {
        self.harmonics.iter().map(|h| h.iterations).collect()
    }

    pub fn to_result_json(&self, k: &SimplicialComplex2) -> ResultJson {
        ResultJson::new(k, &self.generators.h, self.iterations(), self.delta)
    }

    pub fn surviving_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    /// Cost bounds every run must meet; returns the violated ones.
    pub fn cost_violations(&self) -> Vec<String> {
        let n = self.tree.vertex_count();
        let c = &self.cost;
        let mut bad = Vec::new();
        let nn = (n * n.saturating_sub(1) / 2) as u64;
        for &(phase, imp) in &self.gossip_improvements {
            if imp > nn {
                bad.push(format!("{phase}: {imp} improvement broadcasts exceed {nn}"));
            }
        }
        if n > 1 {
            let tree = c.phase_total(Phase::Tree).broadcasts;
            if self.scheduling == Scheduling::Synchronous && (tree != n as u64 || c.phase_max_broadcasts(Phase::Tree) != 1) {
                bad.push(format!("tree: {tree} broadcasts for {n} nodes"));
            }
        }
        let iters = self.iterations_run as u64;
        for v in 0..n {
            let got = c.get(Phase::Harmonic, v).broadcasts;
            if got != self.owned_edges[v] as u64 * iters {
                bad.push(format!("harmonic: node {v} sent {got}, owns {} edges over {iters} iterations", self.owned_edges[v]));
            }
            let integral = c.get(Phase::Integral, v).broadcasts;
            if integral != self.label_harmonics_run as u64 {
                bad.push(format!("integral: node {v} sent {integral}"));
            }
        }
        let p = self.generators.p.len() as u64;
        let later = self.harmonics.len().saturating_sub(self.label_harmonics_run) as u64;
        if p > 0 {
            let pruned_total = c.phase_total(Phase::IntegralPruned).broadcasts;
            if pruned_total != later * self.surviving_count() as u64 {
                bad.push(format!("integral-pruned: {pruned_total} broadcasts, {} surviving nodes", self.surviving_count()));
            }
            let sel = c.phase_max_broadcasts(Phase::Select);
            if sel > p {
                bad.push(format!("select: a node sent {sel} packets with |P| = {p}"));
            }
            let red = c.phase_max_broadcasts(Phase::Reduce);
            if red > p * p {
                bad.push(format!("integral-reduce: a node sent {red} packets with |P| = {p}"));
            }
        }
        bad
    }
}

/// Values of `y` on each node's parent edge.
fn parent_values(t: &SpanningTree, y: &[f64]) -> Vec<f64> {
    (0..t.vertex_count()).map(|v| t.parent_edge(v).map_or(0.0, |e| y[e])).collect()
}

/// The whole protocol on a simulated network: root election, tree, step
/// size, label harmonics and integrals, classification, pruning and
/// selection of `P`, the remaining harmonics, and the reduction at the
/// final root.
pub fn run_full_pipeline(
    k: &SimplicialComplex2,
    cfg: &PipelineConfig,
    sim_cfg: &SimConfig,
) -> Result<DistributedOutput, NetsimError> {
    cfg.validate()?;
    let n = k.vertex_count();
    let root_hint = cfg.root.resolve(n)?;
    let mut sim = Simulator::new(network_of(k), sim_cfg.clone())?;
    let mut gossip_improvements = Vec::new();

    let r0 = match cfg.root {
        RootChoice::MaxId if n > 1 => {
            let ids: Vec<f64> = (0..n).map(|v| v as f64).collect();
            let g = run_max_gossip(&mut sim, Phase::GossipRoot, &ids)?;
            gossip_improvements.push((Phase::GossipRoot, g.improvement_broadcasts));
            g.value as usize
        }
        _ => root_hint,
    };
    if k.edge_count() == 0 {
        return Ok(DistributedOutput {
            tree: spanning_tree_bfs(k, r0)?,
            final_root: r0,
            delta: 0.0,
            harmonics: Vec::new(),
            norms: Vec::new(),
            noncontractible: Vec::new(),
            terminal: vec![false; n],
            active: vec![false; n],
            generators: GeneratorSet::empty(),
            cost: sim.cost().clone(),
            transcript: sim.take_transcript(),
            gossip_improvements,
            label_harmonics_run: 0,
            owned_edges: vec![0; n],
            iterations_run: 0,
            scheduling: sim_cfg.scheduling,
        });
    }
    let tree = run_spanning_tree(&mut sim, k, r0)?;
    // every node assembles its rows from local structure
    let l = build_laplacian_combinatorial(k);
    let em = EdgeEmulation::new(k, &l);

    let delta = match cfg.harmonic.delta {
        Some(d) => d,
        None => {
            let sums: Vec<f64> = (0..n)
                .map(|v| em.owned[v].iter().map(|&e| l.row_abs_sum(e)).fold(0.0, f64::max))
                .collect();
            let g = run_max_gossip(&mut sim, Phase::GossipDelta, &sums)?;
            gossip_improvements.push((Phase::GossipDelta, g.improvement_broadcasts));
            1.0 / g.value
        }
    };

    let mut harmonics = Vec::new();
    let mut norms = Vec::new();
    let all = vec![true; n];
    let full = IntegralTree { root: r0, parent: tree.parents(), active: &all };
    let nontree = tree.non_tree_edges();
    // integrals of each non-tree edge's cycle, evaluated at its owner
    let mut integrals: Vec<Vec<f64>> = vec![Vec::new(); nontree.len()];
    let kl = cfg.label_harmonics;
    for i in 0..kl {
        let h = run_distributed_harmonic(&mut sim, &em, &l, &tree, &cfg.harmonic_config(i), delta, i)?;
        let fo = run_integral_function(&mut sim, &full, Phase::Integral, i, &parent_values(&tree, &h.result.y))?;
        for (slot, &e) in nontree.iter().enumerate() {
            let [a, b] = k.edge(e);
            let fa = fo.heard[b][&a];
            integrals[slot].push(edge_cycle_integral(fa, h.result.y[e], fo.f[b].unwrap()));
        }
        harmonics.push(h.result);
        norms.push(h.norm);
    }

    let mut own = vec![Vec::new(); n];
    let mut records = vec![Vec::new(); n];
    let mut noncontractible = Vec::new();
    for (slot, &e) in nontree.iter().enumerate() {
        let [a, b] = k.edge(e);
        let hop_length = tree.hop(a) + tree.hop(b) + 1;
        let ints = &integrals[slot];
        let zero = ints.iter().zip(&norms).all(|(x, &nm)| x.abs() < cfg.contractibility.threshold(nm, hop_length));
        if !zero {
            noncontractible.push(e);
            own[b].push(a);
            records[b].push(ReportEntry { terminals: (a, b), label: ints[0].abs(), hop_length, integrals: ints.clone() });
        }
    }
    let terminal = run_classification(&mut sim, &own)?;
    let children: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            let mut c = tree.children(v).to_vec();
            c.sort_unstable();
            c
        })
        .collect();
    let sel = run_prune_and_select(&mut sim, r0, tree.parents(), &children, &terminal, records, cfg.label_tol)?;

    let iterations_run = harmonics.iter().map(|h| h.iterations).sum();
    let owned_edges: Vec<usize> = (0..n).map(|v| em.owned_count(v)).collect();
    let mut out = DistributedOutput {
        tree,
        final_root: r0,
        delta,
        harmonics,
        norms,
        noncontractible,
        terminal,
        active: vec![false; n],
        generators: GeneratorSet::empty(),
        cost: CostReport::new(),
        transcript: Vec::new(),
        gossip_improvements,
        label_harmonics_run: kl,
        iterations_run,
        owned_edges,
        scheduling: sim_cfg.scheduling,
    };
    if sel.p.is_empty() {
        out.harmonics.truncate(1);
        out.norms.truncate(1);
        return finish(out, sim);
    }

    let final_root = run_announce(
        &mut sim,
        r0,
        out.tree.parents(),
        &children,
        &out.terminal,
        &sel.surviving_children,
        &sel.p,
    )?;
    out.final_root = final_root;
    let mut active = vec![false; n];
    let mut stack = vec![final_root];
    while let Some(v) = stack.pop() {
        active[v] = true;
        stack.extend(&sel.surviving_children[v]);
    }
    let mut pruned_parent = out.tree.parents().to_vec();
    pruned_parent[final_root] = None;
    for (v, p) in pruned_parent.iter_mut().enumerate() {
        if !active[v] {
            *p = None;
        }
    }
    let pruned = IntegralTree { root: final_root, parent: &pruned_parent, active: &active };

    let m = sel.p.len();
    let mut columns: Vec<Vec<(usize, Vec<f64>)>> = vec![Vec::new(); n];
    for (j, entry) in sel.p.iter().enumerate() {
        columns[entry.terminals.1].push((j, Vec::new()));
    }
    for i in kl..m {
        let h = run_distributed_harmonic(&mut sim, &em, &l, &out.tree, &cfg.harmonic_config(i), delta, i)?;
        let fo = run_integral_function(&mut sim, &pruned, Phase::IntegralPruned, i, &parent_values(&out.tree, &h.result.y))?;
        for (j, entry) in sel.p.iter().enumerate() {
            let (a, b) = entry.terminals;
            let e = k.edge_id(a, b).expect("P edge exists");
            let val = edge_cycle_integral(fo.heard[b][&a], h.result.y[e], fo.f[b].expect("terminal is active"));
            let col = columns[b].iter_mut().find(|c| c.0 == j).unwrap();
            col.1.push(val);
        }
        out.iterations_run += h.result.iterations;
        out.harmonics.push(h.result);
        out.norms.push(h.norm);
    }

    let mut r: Vec<Vec<f64>> = (0..kl.min(m)).map(|i| sel.p.iter().map(|e| e.integrals[i]).collect()).collect();
    if m > kl {
        let reduce_children: Vec<Vec<usize>> =
            (0..n).map(|v| if active[v] { sel.surviving_children[v].clone() } else { Vec::new() }).collect();
        let cols = run_reduce_convergecast(&mut sim, &pruned_parent, &active, &reduce_children, columns)?;
        if cols.len() != m {
            return Err(NetsimError::Protocol(format!("root gathered {} of {m} columns", cols.len())));
        }
        for i in 0..m - kl {
            r.push(cols.iter().map(|c| c.1[i]).collect());
        }
    }
    out.active = active;

    let p: Vec<CycleRecord> = sel
        .p
        .iter()
        .map(|entry| {
            let (a, b) = entry.terminals;
            let e = k.edge_id(a, b).expect("P edge exists");
            Ok(CycleRecord {
                nontree_edge: e,
                terminals: (a, b),
                chain: cycle_from_nontree_edge(k, &out.tree, e)?,
                integrals: entry.integrals.clone(),
                label: entry.label,
                hop_length: entry.hop_length,
            })
        })
        .collect::<Result<_, NetsimError>>()?;
    out.generators = reduce_matrix(p, r, cfg.pivot_tol)?;
    finish(out, sim)
}

fn finish(mut out: DistributedOutput, mut sim: Simulator) -> Result<DistributedOutput, NetsimError> {
    let (sent, delivered) = sim.delivery_counts();
    if sent != delivered {
        return Err(NetsimError::Protocol(format!("{sent} deliveries scheduled, {delivered} made")));
    }
    out.cost = sim.cost().clone();
    out.transcript = sim.take_transcript();
    let bad = out.cost_violations();
    if !bad.is_empty() {
        return Err(NetsimError::CostBound(bad.join("; ")));
    }
    Ok(out)
}
