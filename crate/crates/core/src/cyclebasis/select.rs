use super::CycleRecord;

/// Threshold below which a cycle integral counts as zero:
/// `abs + rel * ||y|| * hop_length`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContractibilityTol {
    pub abs: f64,
    pub rel: f64,
}

impl Default for ContractibilityTol {
    fn default() -> Self {
        Self { abs: 1e-4, rel: 1e-6 }
    }
}

impl ContractibilityTol {
    pub fn threshold(&self, harmonic_norm: f64, hop_length: usize) -> f64 {
        self.abs + self.rel * harmonic_norm * hop_length as f64
    }
}

/// Whether the record's integrals all vanish. `harmonic_norms[i]` is the
/// Euclidean norm of label harmonic `i`.
pub fn is_contractible(rec: &CycleRecord, harmonic_norms: &[f64], tol: ContractibilityTol) -> bool {
    rec.integrals
        .iter()
        .zip(harmonic_norms)
        .all(|(i, &n)| i.abs() < tol.threshold(n, rec.hop_length))
}

/// Splits `records` into `(contractible, non_contractible)`, order preserved.
pub fn classify_cycles(
    records: Vec<CycleRecord>,
    harmonic_norms: &[f64],
    tol: ContractibilityTol,
) -> (Vec<CycleRecord>, Vec<CycleRecord>) {
    records.into_iter().partition(|r| is_contractible(r, harmonic_norms, tol))
}

/// Whether two integral vectors agree up to a global sign within relative
/// tolerance `tol`.
pub fn labels_match(a: &[f64], b: &[f64], tol: f64) -> bool {
    let scale = a.iter().chain(b).fold(0.0f64, |m, v| m.max(v.abs()));
    let dist = |sign: f64| a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - sign * y).abs()));
    dist(1.0).min(dist(-1.0)) <= tol * scale
}

/// Groups records whose labels match, each group anchored at its
/// smallest-label member. Groups come out by ascending label, members by
/// `(hop_length, edge)`.
pub fn partition_homologous(mut records: Vec<CycleRecord>, tol: f64) -> Vec<Vec<CycleRecord>> {
    records.sort_by(|x, y| {
        x.label
            .total_cmp(&y.label)
            .then_with(|| x.selection_key().cmp(&y.selection_key()))
    });
    let mut clusters: Vec<Vec<CycleRecord>> = Vec::new();
    for rec in records {
        // the newest anchors sit closest in label
        match clusters
            .iter_mut()
            .rev()
            .find(|c| labels_match(&c[0].integrals, &rec.integrals, tol))
        {
            Some(c) => c.push(rec),
            None => clusters.push(vec![rec]),
        }
    }
    for c in &mut clusters {
        c.sort_by_key(CycleRecord::selection_key);
    }
    clusters
}

/// One representative per cluster, the one with the smallest
/// `(hop_length, edge)`; the result is ordered by that key too.
pub fn select_p(clusters: &[Vec<CycleRecord>]) -> Vec<CycleRecord> {
    let mut p: Vec<CycleRecord> = clusters
        .iter()
        .filter_map(|c| c.iter().min_by_key(|r| r.selection_key()).cloned())
        .collect();
    p.sort_by_key(CycleRecord::selection_key);
    p
}
