//! Test-side helpers: random complexes and dense linear algebra done with
//! nalgebra, independent of the library's own sparse code.
#![allow(dead_code)]

use homology_core::complex::{Laplacian1, SimplicialComplex2};
use homology_core::rng::SplitMix64;
use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Connected complex on `n` vertices: a random tree, extra edges with
/// probability `edge_p`, and each 3-clique filled with probability `tri_p`.
pub fn random_complex(n: usize, seed: u64, edge_p: f64, tri_p: f64) -> SimplicialComplex2 {
    let mut g = SplitMix64::new(seed);
    let mut adj = vec![vec![false; n]; n];
    for v in 1..n {
        let u = g.next_below(v as u64) as usize;
        adj[u][v] = true;
    }
    for a in 0..n {
        for b in a + 1..n {
            if g.next_f64() < edge_p {
                adj[a][b] = true;
            }
        }
    }
    let edges: Vec<(usize, usize)> =
        (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|&(a, b)| adj[a][b]).collect();
    let mut tris = Vec::new();
    for &(a, b) in &edges {
        for c in b + 1..n {
            if adj[a][c] && adj[b][c] && g.next_f64() < tri_p {
                tris.push((a, b, c));
            }
        }
    }
    SimplicialComplex2::from_unsorted(n, edges, tris).expect("random complex is valid")
}

/// Flag complex of a random tree plus Erdos-Renyi edges of probability `p`.
pub fn random_flag_complex(n: usize, seed: u64, p: f64) -> SimplicialComplex2 {
    let k = random_complex(n, seed, p, 0.0);
    let edges = k.edges().iter().map(|&[a, b]| (a, b));
    SimplicialComplex2::flag_from_edges(n, edges).expect("flag complex is valid")
}

/// Vertex-by-edge incidence: -1 at the lower end, +1 at the upper.
pub fn dense_d1(k: &SimplicialComplex2) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(k.vertex_count(), k.edge_count());
    for (e, &[a, b]) in k.edges().iter().enumerate() {
        m[(a, e)] = -1.0;
        m[(b, e)] = 1.0;
    }
    m
}

/// Edge-by-triangle incidence: `[a,b,c] -> [b,c] - [a,c] + [a,b]`.
pub fn dense_d2(k: &SimplicialComplex2) -> DMatrix<f64> {
    let pos = |a: usize, b: usize| k.edges().iter().position(|&e| e == [a, b]).unwrap();
    let mut m = DMatrix::zeros(k.edge_count(), k.triangle_count());
    for (t, &[a, b, c]) in k.triangles().iter().enumerate() {
        m[(pos(b, c), t)] = 1.0;
        m[(pos(a, c), t)] = -1.0;
        m[(pos(a, b), t)] = 1.0;
    }
    m
}

pub fn dense_l1(k: &SimplicialComplex2) -> DMatrix<f64> {
    let d1 = dense_d1(k);
    let d2 = dense_d2(k);
    &d2 * d2.transpose() + d1.transpose() * &d1
}

pub fn to_dense(l: &Laplacian1) -> DMatrix<f64> {
    let n = l.dim();
    DMatrix::from_fn(n, n, |i, j| l.get(i, j))
}

/// Eigen-decomposition based orthogonal projection onto `ker l`.
pub fn kernel_projection(l: &DMatrix<f64>, y0: &[f64]) -> Vec<f64> {
    let eig = SymmetricEigen::new(l.clone());
    let scale = eig.eigenvalues.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let y = DVector::from_column_slice(y0);
    let mut p = DVector::zeros(y0.len());
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda.abs() < 1e-9 * scale {
            let v = eig.eigenvectors.column(i);
            p += v * v.dot(&y);
        }
    }
    p.iter().copied().collect()
}

/// Smallest nonzero and largest eigenvalue of a PSD matrix.
pub fn spectrum_ends(l: &DMatrix<f64>) -> (f64, f64) {
    let eig = SymmetricEigen::new(l.clone());
    let max = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(*v));
    let min = eig.eigenvalues.iter().copied().filter(|&v| v > 1e-9 * max.max(1.0)).fold(f64::INFINITY, f64::min);
    (min, max)
}

pub fn rank(m: &DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    m.clone().svd(false, false).rank(1e-8)
}

/// `b1 = |E| - rank d1 - rank d2`, in floating point.
pub fn float_betti1(k: &SimplicialComplex2) -> usize {
    k.edge_count() - rank(&dense_d1(k)) - rank(&dense_d2(k))
}

/// Ordinary least squares `y = a + b x`; returns the coefficient of
/// determination.
pub fn r_squared(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if syy == 0.0 {
        return 1.0;
    }
    sxy * sxy / (sxx * syy)
}
