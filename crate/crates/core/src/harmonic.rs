//! Harmonics (kernel vectors of `L1`) by the damped iteration
//! `y <- y - delta * L1 * y` from a random start.
//!
//! With `0 < delta < 2 / lambda_max` the iterate converges to the orthogonal
//! projection of the start vector onto `ker L1`; the error contracts by
//! `1 - delta * lambda_1` per step, `lambda_1` being the smallest nonzero
//! eigenvalue. The default `delta = 1 / ||L1||_1` is always admissible since
//! the 1-norm bounds the spectral radius of a symmetric matrix.
//!
//! Iteration stops once `||y_{k+1} - y_k||_inf < epsilon * delta`, that is
//! once the residual `||L1 y_k||_inf` drops below `epsilon`.

use thiserror::Error;

use crate::complex::{l1_one_norm, Laplacian1};
use crate::rng::{to_unit, SplitMix64};

/// Largest `|E|` accepted by the dense reference projection.
pub const REFERENCE_EDGE_LIMIT: usize = 500;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarmonicError {
    #[error("invalid harmonic configuration: {0}")]
    InvalidConfig(String),
    #[error("Laplacian has no entries")]
    ZeroMatrix,
    #[error("no convergence within {} iterations (last update {})", .partial.iterations, .partial.final_update_norm)]
    MaxIterationsExceeded { partial: Box<HarmonicResult> },
    #[error("iteration diverged after {} steps; delta {} is too large", .partial.iterations, .partial.delta_used)]
    Diverged { partial: Box<HarmonicResult> },
    #[error("{edges} edges exceeds the dense reference limit of {limit}")]
    ScaleExceeded { edges: usize, limit: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicConfig {
    pub epsilon: f64,
    /// Step size; `None` means `1 / ||L1||_1`.
    pub delta: Option<f64>,
    /// Iteration cap; `None` means `100 * |E| * digits(epsilon)`.
    pub max_iterations: Option<usize>,
    pub seed: u64,
}

impl Default for HarmonicConfig {
    fn default() -> Self {
        Self { epsilon: 1e-6, delta: None, max_iterations: None, seed: 0 }
    }
}

impl HarmonicConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), HarmonicError> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(HarmonicError::InvalidConfig(format!("epsilon {} must be positive", self.epsilon)));
        }
        if let Some(d) = self.delta {
            if !(d > 0.0 && d.is_finite()) {
                return Err(HarmonicError::InvalidConfig(format!("delta {d} must be positive")));
            }
        }
        if self.max_iterations == Some(0) {
            return Err(HarmonicError::InvalidConfig("max_iterations must be positive".into()));
        }
        Ok(())
    }

    pub fn max_iterations_for(&self, edges: usize) -> usize {
        self.max_iterations.unwrap_or_else(|| default_max_iterations(edges, self.epsilon))
    }
}

/// Decimal digits demanded by `epsilon`, at least 1.
pub fn digits(epsilon: f64) -> usize {
    (-epsilon.log10()).ceil().max(1.0) as usize
}

pub fn default_max_iterations(edges: usize, epsilon: f64) -> usize {
    100 * edges.max(1) * digits(epsilon)
}

#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicResult {
    pub y: Vec<f64>,
    pub iterations: usize,
    pub delta_used: f64,
    /// `||y_k - y_{k-1}||_inf` of the last step taken.
    pub final_update_norm: f64,
}

/// Start value of edge `e`: uniform on `[-0.5, 0.5)`, from output `e` of the
/// SplitMix64 stream seeded with `seed`.
#[inline]
pub fn initial_value(seed: u64, e: usize) -> f64 {
    to_unit(SplitMix64::at(seed, e as u64)) - 0.5
}

pub fn initial_vector(len: usize, seed: u64) -> Vec<f64> {
    let mut g = SplitMix64::new(seed);
    (0..len).map(|_| g.next_f64() - 0.5).collect()
}

/// `1 / ||L1||_1`.
pub fn compute_delta(l: &Laplacian1) -> Result<f64, HarmonicError> {
    let norm = l1_one_norm(l);
    if norm > 0.0 {
        Ok(1.0 / norm)
    } else {
        Err(HarmonicError::ZeroMatrix)
    }
}

/// Writes `y - delta * L1 y` into `next`; returns `||next - y||_inf`.
pub fn harmonic_step(l: &Laplacian1, delta: f64, y: &[f64], next: &mut [f64]) -> f64 {
    let mut max_update: f64 = 0.0;
    for (i, out) in next.iter_mut().enumerate() {
        let v = edge_update(y[i], delta, l.row_dot(i, y));
        max_update = max_update.max((v - y[i]).abs());
        *out = v;
    }
    max_update
}

/// The per-edge update both the centralized loop and the simulated edge
/// processors apply.
#[inline]
pub fn edge_update(y: f64, delta: f64, row_product: f64) -> f64 {
    y - delta * row_product
}

pub fn iterate_harmonic(l: &Laplacian1, cfg: &HarmonicConfig) -> Result<HarmonicResult, HarmonicError> {
    cfg.validate()?;
    let n = l.dim();
    if n == 0 {
        return Ok(HarmonicResult { y: Vec::new(), iterations: 0, delta_used: cfg.delta.unwrap_or(0.0), final_update_norm: 0.0 });
    }
    let delta = match cfg.delta {
        Some(d) => d,
        None => compute_delta(l)?,
    };
    let cap = cfg.max_iterations_for(n);
    let threshold = cfg.epsilon * delta;

    let mut y = initial_vector(n, cfg.seed);
    let mut next = vec![0.0; n];
    let mut update = f64::INFINITY;
    for k in 1..=cap {
        update = harmonic_step(l, delta, &y, &mut next);
        std::mem::swap(&mut y, &mut next);
        if !update.is_finite() {
            let partial = HarmonicResult { y, iterations: k, delta_used: delta, final_update_norm: update };
            return Err(HarmonicError::Diverged { partial: Box::new(partial) });
        }
        if update < threshold {
            return Ok(HarmonicResult { y, iterations: k, delta_used: delta, final_update_norm: update });
        }
    }
    let partial = HarmonicResult { y, iterations: cap, delta_used: delta, final_update_norm: update };
    Err(HarmonicError::MaxIterationsExceeded { partial: Box::new(partial) })
}

/// Iteration counts `iterate_harmonic` would report for each of `epsilons`,
/// read off a single trajectory. `cfg.epsilon` is ignored except for
/// validation; the cap follows the smallest epsilon, so a loose tolerance
/// may report a count past its own default cap.
pub fn iterations_per_tolerance(l: &Laplacian1, cfg: &HarmonicConfig, epsilons: &[f64]) -> Result<Vec<usize>, HarmonicError> {
    let tightest = epsilons.iter().copied().fold(f64::INFINITY, f64::min);
    let cfg = HarmonicConfig { epsilon: tightest, ..cfg.clone() };
    cfg.validate()?;
    let n = l.dim();
    if n == 0 {
        return Ok(vec![0; epsilons.len()]);
    }
    let delta = match cfg.delta {
        Some(d) => d,
        None => compute_delta(l)?,
    };
    let cap = cfg.max_iterations_for(n);
    let mut found: Vec<Option<usize>> = vec![None; epsilons.len()];
    let mut y = initial_vector(n, cfg.seed);
    let mut next = vec![0.0; n];
    let mut update = f64::INFINITY;
    for k in 1..=cap {
        update = harmonic_step(l, delta, &y, &mut next);
        std::mem::swap(&mut y, &mut next);
        if !update.is_finite() {
            let partial = HarmonicResult { y, iterations: k, delta_used: delta, final_update_norm: update };
            return Err(HarmonicError::Diverged { partial: Box::new(partial) });
        }
        for (slot, &eps) in found.iter_mut().zip(epsilons) {
            if slot.is_none() && update < eps * delta {
                *slot = Some(k);
            }
        }
        if found.iter().all(Option::is_some) {
            return Ok(found.into_iter().flatten().collect());
        }
    }
    let partial = HarmonicResult { y, iterations: cap, delta_used: delta, final_update_norm: update };
    Err(HarmonicError::MaxIterationsExceeded { partial: Box::new(partial) })
}

/// Update norms `||y_{k+1} - y_k||_inf` of the first `steps` iterations from
/// `y0`, without any stopping rule.
pub fn update_norm_trace(l: &Laplacian1, y0: &[f64], delta: f64, steps: usize) -> Vec<f64> {
    let mut y = y0.to_vec();
    let mut next = vec![0.0; y.len()];
    (0..steps)
        .map(|_| {
            let u = harmonic_step(l, delta, &y, &mut next);
            std::mem::swap(&mut y, &mut next);
            u
        })
        .collect()
}

/// Orthonormal basis of `ker L1` from dense Gaussian elimination with
/// partial pivoting. Test-scale only.
pub fn kernel_basis_reference(l: &Laplacian1) -> Result<Vec<Vec<f64>>, HarmonicError> {
    let n = l.dim();
    if n > REFERENCE_EDGE_LIMIT {
        return Err(HarmonicError::ScaleExceeded { edges: n, limit: REFERENCE_EDGE_LIMIT });
    }
    let mut a = l.to_dense();
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let tol = 1e-9 * scale * n as f64;

    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..n {
        if row == n {
            break;
        }
        let (best, best_val) = (row..n)
            .map(|r| (r, a[r][col].abs()))
            .fold((row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_val <= tol {
            continue;
        }
        a.swap(row, best);
        let p = a[row][col];
        for v in a[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = a[row].clone();
        for (r, other) in a.iter_mut().enumerate() {
            if r != row && other[col] != 0.0 {
                let f = other[col];
                for (x, pv) in other.iter_mut().zip(&pivot_row) {
                    *x -= f * pv;
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
    }

    let mut is_pivot = vec![false; n];
    for &c in &pivot_cols {
        is_pivot[c] = true;
    }
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for free in (0..n).filter(|&c| !is_pivot[c]) {
        let mut x = vec![0.0; n];
        x[free] = 1.0;
        for (r, &pc) in pivot_cols.iter().enumerate() {
            x[pc] = -a[r][free];
        }
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for q in &basis {
                let d = dot(q, &x);
                for (xi, qi) in x.iter_mut().zip(q) {
                    *xi -= d * qi;
                }
            }
        }
        let norm = dot(&x, &x).sqrt();
        if norm > 1e-12 {
            basis.push(x.into_iter().map(|v| v / norm).collect());
        }
    }
    Ok(basis)
}

/// Orthogonal projection of `y0` onto `ker L1` (`K K^T y0`).
pub fn project_onto_kernel_reference(l: &Laplacian1, y0: &[f64]) -> Result<Vec<f64>, HarmonicError> {
    let basis = kernel_basis_reference(l)?;
    let mut out = vec![0.0; y0.len()];
    for q in &basis {
        let c = dot(q, y0);
        for (o, qi) in out.iter_mut().zip(q) {
            *o += c * qi;
        }
    }
    Ok(out)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
