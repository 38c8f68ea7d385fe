//! Thick-restart Lanczos with full reorthogonalization.
//!
//! Each cycle extends an orthonormal Krylov basis to `m` vectors, solves the
//! projected `m × m` problem, and restarts from the best Ritz vectors plus
//! the current residual direction. For symmetric operators this is
//! equivalent to implicit restarting with exact shifts.

use rand::Rng;

use crate::error::{param, Error, Result};
use crate::graph::SparseGraph;
use crate::rng::stream;
use crate::spectral::eigenpairs::{canonicalize_sign, cluster_flags, EigenPairs};
use crate::spectral::jacobi::symmetric_eigen;
use crate::tensor::CsrMatrix;

/// Symmetric linear operator applied matrix-free.
pub trait SymmetricOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl SymmetricOperator for SparseGraph {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec(x, y);
    }
}

impl SymmetricOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.rows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.spmv(x, y);
    }
}

/// Which end of the spectrum to target.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Which {
    #[default]
    LargestAlgebraic,
    LargestMagnitude,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenConfig {
    pub t: usize,
    /// Required `‖A·u − λ·u‖₂` for every returned pair.
    pub tol: f64,
    /// Maximum number of restart cycles.
    pub max_restarts: usize,
    pub which: Which,
    /// Upper bound on `t`.
    pub max_t: usize,
    /// Krylov basis size; `None` picks one from `t`.
    pub basis_size: Option<usize>,
    /// Seed of the starting vector.
    pub seed: u64,
}

impl Default for EigenConfig {
    fn default() -> Self {
        Self {
            t: 4,
            tol: 1e-10,
            max_restarts: 500,
            which: Which::LargestAlgebraic,
            max_t: 10,
            basis_size: None,
            seed: 0,
        }
    }
}

impl EigenConfig {
    pub fn with_t(t: usize) -> Self {
        Self {
            t,
            ..Self::default()
        }
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (y, x) in y.iter_mut().zip(x) {
        *y += alpha * x;
    }
}

fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// Two passes of classical Gram-Schmidt against `basis`; returns the
/// accumulated projection coefficients.
fn orthogonalize(basis: &[Vec<f64>], w: &mut [f64]) -> Vec<f64> {
    let mut coef = vec![0.0; basis.len()];
    for _ in 0..2 {
        let c: Vec<f64> = basis.iter().map(|v| dot(v, w)).collect();
        for (v, &ci) in basis.iter().zip(&c) {
            axpy(-ci, v, w);
        }
        for (acc, ci) in coef.iter_mut().zip(c) {
            *acc += ci;
        }
    }
    coef
}

/// Unit vector orthogonal to `basis`, drawn from `rng`. `None` when the basis
/// already spans the space numerically.
fn fresh_direction(basis: &[Vec<f64>], n: usize, rng: &mut impl Rng) -> Option<Vec<f64>> {
    for _ in 0..8 {
        let mut w: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
        let before = norm(&w);
        orthogonalize(basis, &mut w);
        let after = norm(&w);
        if after > 1e-8 * before {
            w.iter_mut().for_each(|x| *x /= after);
            return Some(w);
        }
    }
    None
}

/// Leading eigenpairs of a symmetric operator.
pub fn top_eigenpairs_op<A: SymmetricOperator + ?Sized>(op: &A, cfg: &EigenConfig) -> Result<EigenPairs> {
    let n = op.dim();
    let t = cfg.t;
    if n == 0 {
        return Err(param("graph", "operator has no rows"));
    }
    if t == 0 {
        return Err(param("t", "need at least one eigenpair"));
    }
    if t > n {
        return Err(param("t", format!("requested {t} eigenpairs of a {n}-node graph")));
    }
    if t > cfg.max_t {
        return Err(param("t", format!("requested {t} eigenpairs, cap is {}", cfg.max_t)));
    }
    if !(cfg.tol > 0.0) {
        return Err(param("tol", "tolerance must be positive"));
    }
    let m = cfg
        .basis_size
        .unwrap_or_else(|| (3 * t).max(t + 20))
        .clamp(t + 1, n.max(t + 1))
        .min(n);

    let mut rng = stream(cfg.seed, "lanczos-start");
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    basis.push(fresh_direction(&[], n, &mut rng).expect("nonzero random start"));
    // Projected matrix T = Vᵀ A V, row-major m × m.
    let mut proj = vec![0.0; m * m];
    let mut kept = 0usize;
    let mut w = vec![0.0; n];
    let mut last_residuals = vec![f64::INFINITY; t];

    for _cycle in 0..cfg.max_restarts.max(1) {
        let mut beta = 0.0;
        let mut residual_dir: Option<Vec<f64>> = None;
        for j in kept..m {
            op.apply(&basis[j], &mut w);
            let coef = orthogonalize(&basis[..=j], &mut w);
            for (i, &c) in coef.iter().enumerate().take(j) {
                proj[i * m + j] = c;
                proj[j * m + i] = c;
            }
            proj[j * m + j] = coef[j];
            beta = norm(&w);
            let scale = proj[j * m + j].abs().max(beta).max(1.0);
            if j + 1 < m {
                if beta <= 1e-12 * scale {
                    // Invariant subspace: continue from a fresh orthogonal direction.
                    let v = fresh_direction(&basis, n, &mut rng)
                        .ok_or_else(|| param("t", "Krylov basis exhausted"))?;
                    proj[(j + 1) * m + j] = 0.0;
                    proj[j * m + j + 1] = 0.0;
                    basis.push(v);
                } else {
                    proj[(j + 1) * m + j] = beta;
                    proj[j * m + j + 1] = beta;
                    basis.push(w.iter().map(|x| x / beta).collect());
                }
            } else {
                residual_dir = Some(w.clone());
            }
        }
        let f = residual_dir.expect("loop runs at least once since kept < m");
        // When the full space is spanned the residual is roundoff only.
        let beta = if m == n { 0.0 } else { beta };

        let (theta, y) = symmetric_eigen(&proj, m);
        let mut order: Vec<usize> = (0..m).collect();
        match cfg.which {
            Which::LargestAlgebraic => order.sort_by(|&a, &b| theta[b].total_cmp(&theta[a])),
            Which::LargestMagnitude => order.sort_by(|&a, &b| theta[b].abs().total_cmp(&theta[a].abs())),
        }
        let estimates: Vec<f64> = order[..t].iter().map(|&k| (beta * y[(m - 1) * m + k]).abs()).collect();

        let ritz_vector = |k: usize| -> Vec<f64> {
            let mut x = vec![0.0; n];
            for (i, v) in basis.iter().enumerate().take(m) {
                axpy(y[i * m + k], v, &mut x);
            }
            x
        };

        if estimates.iter().all(|&r| r <= cfg.tol) {
            let mut values = Vec::with_capacity(t);
            let mut vectors = Vec::with_capacity(t);
            let mut residuals = Vec::with_capacity(t);
            for &k in &order[..t] {
                let mut x = ritz_vector(k);
                let nx = norm(&x);
                x.iter_mut().for_each(|v| *v /= nx);
                canonicalize_sign(&mut x);
                let lambda = theta[k];
                op.apply(&x, &mut w);
                let r = w.iter().zip(&x).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
                values.push(lambda);
                vectors.push(x);
                residuals.push(r);
            }
            last_residuals = residuals.clone();
            if residuals.iter().all(|&r| r <= cfg.tol) {
                let next = order.get(t).map(|&k| theta[k]);
                let mut idx: Vec<usize> = (0..t).collect();
                idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
                let eigenvalues: Vec<f64> = idx.iter().map(|&i| values[i]).collect();
                let next = match cfg.which {
                    Which::LargestAlgebraic => next,
                    Which::LargestMagnitude => None,
                };
                let clustered = cluster_flags(&eigenvalues, next);
                return Ok(EigenPairs {
                    eigenvectors: idx.iter().map(|&i| vectors[i].clone()).collect(),
                    residuals: idx.iter().map(|&i| residuals[i]).collect(),
                    eigenvalues,
                    clustered,
                });
            }
        } else {
            last_residuals = estimates;
        }

        // Thick restart: keep the leading Ritz vectors and append the residual direction.
        let keep = (t + (m - t) / 2).min(m - 1).max(t);
        let mut new_basis: Vec<Vec<f64>> = order[..keep].iter().map(|&k| ritz_vector(k)).collect();
        for v in &mut new_basis {
            let nv = norm(v);
            v.iter_mut().for_each(|x| *x /= nv);
        }
        proj.iter_mut().for_each(|x| *x = 0.0);
        for (i, &k) in order[..keep].iter().enumerate() {
            proj[i * m + i] = theta[k];
        }
        let next = if beta > 0.0 {
            let mut v: Vec<f64> = f.iter().map(|x| x / beta).collect();
            orthogonalize(&new_basis, &mut v);
            let nv = norm(&v);
            (nv > 1e-8).then(|| {
                v.iter_mut().for_each(|x| *x /= nv);
                v
            })
        } else {
            None
        };
        let next = match next {
            Some(v) => {
                for (i, &k) in order[..keep].iter().enumerate() {
                    let s = beta * y[(m - 1) * m + k];
                    proj[i * m + keep] = s;
                    proj[keep * m + i] = s;
                }
                v
            }
            None => fresh_direction(&new_basis, n, &mut rng).ok_or_else(|| param("t", "Krylov basis exhausted"))?,
        };
        new_basis.push(next);
        basis = new_basis;
        kept = keep;
    }
    Err(Error::Convergence {
        iterations: cfg.max_restarts,
        residuals: last_residuals,
    })
}

/// Top `cfg.t` adjacency eigenpairs of `g`.
pub fn top_eigenpairs(g: &SparseGraph, cfg: &EigenConfig) -> Result<EigenPairs> {
    top_eigenpairs_op(g, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> SparseGraph {
        SparseGraph::from_edges(n, edges.iter().copied()).unwrap()
    }

    #[test]
    fn triangle_perron_vector() {
        let g = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        let p = top_eigenpairs(&g, &EigenConfig::with_t(1)).unwrap();
        assert!((p.eigenvalues[0] - 2.0).abs() < 1e-12);
        let c = 1.0 / 3f64.sqrt();
        assert!(p.vector(0).iter().all(|&x| (x - c).abs() < 1e-12));
    }

    #[test]
    fn path_p3_two_pairs() {
        // Dense oracle on the 3×3 path: λ = √2, 0, −√2.
        let g = graph(3, &[(0, 1), (1, 2)]);
        let p = top_eigenpairs(&g, &EigenConfig::with_t(2)).unwrap();
        let s = 2f64.sqrt();
        assert!((p.eigenvalues[0] - s).abs() < 1e-12);
        assert!(p.eigenvalues[1].abs() < 1e-12);
        let u = p.vector(0);
        assert!((u[0] - 0.5).abs() < 1e-12 && (u[1] - s / 2.0).abs() < 1e-12 && (u[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn edgeless_graph() {
        let g = SparseGraph::empty(5);
        let p = top_eigenpairs(&g, &EigenConfig::with_t(1)).unwrap();
        assert_eq!(p.eigenvalues[0], 0.0);
        assert_eq!(p.residuals[0], 0.0);
    }

    #[test]
    fn parameter_errors() {
        let g = graph(3, &[(0, 1)]);
        assert!(top_eigenpairs(&g, &EigenConfig::with_t(0)).is_err());
        assert!(top_eigenpairs(&g, &EigenConfig::with_t(4)).is_err());
        assert!(top_eigenpairs(&SparseGraph::empty(20), &EigenConfig::with_t(11)).is_err());
        let cfg = EigenConfig { t: 11, max_t: 12, ..EigenConfig::default() };
        assert!(top_eigenpairs(&SparseGraph::empty(20), &cfg).is_ok());
    }

    #[test]
    fn non_convergence_reports_residuals() {
        // A long cycle has tightly clustered top eigenvalues; one short cycle cannot converge.
        let n = 400;
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        let g = graph(n, &edges);
        let cfg = EigenConfig { t: 1, max_restarts: 1, basis_size: Some(4), ..EigenConfig::default() };
        match top_eigenpairs(&g, &cfg) {
            Err(Error::Convergence { residuals, .. }) => assert_eq!(residuals.len(), 1),
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn diagonal_operator_with_known_spectrum() {
        let n = 300;
        let diag: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin() * 5.0).collect();
        let op = CsrMatrix::new(n, n, (0..=n).collect(), (0..n).collect(), diag.clone()).unwrap();
        let mut sorted = diag.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let p = top_eigenpairs_op(&op, &EigenConfig::with_t(5)).unwrap();
        for k in 0..5 {
            assert!((p.eigenvalues[k] - sorted[k]).abs() < 1e-9, "{k}");
        }
    }

    #[test]
    fn largest_magnitude_mode() {
        // Star K1,4 plus an isolated node: λ = ±2, 0, 0, 0, 0.
        let g = graph(6, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        let cfg = EigenConfig { t: 2, which: Which::LargestMagnitude, ..EigenConfig::default() };
        let p = top_eigenpairs(&g, &cfg).unwrap();
        assert!((p.eigenvalues[0] - 2.0).abs() < 1e-10);
        assert!((p.eigenvalues[1] + 2.0).abs() < 1e-10);
    }

    #[test]
    fn disconnected_components_are_found() {
        // K4 ∪ K3: the start vector's Krylov space breaks down at least once.
        let g = graph(7, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (4, 5), (5, 6), (4, 6)]);
        let p = top_eigenpairs(&g, &EigenConfig::with_t(2)).unwrap();
        assert!((p.eigenvalues[0] - 3.0).abs() < 1e-10);
        assert!((p.eigenvalues[1] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn deterministic() {
        let edges: Vec<_> = (0..200).flat_map(|i| [(i, (i * 7 + 3) % 200), (i, (i * 13 + 5) % 200)]).collect();
        let g = graph(200, &edges);
        let a = top_eigenpairs(&g, &EigenConfig::with_t(4)).unwrap();
        let b = top_eigenpairs(&g, &EigenConfig::with_t(4)).unwrap();
        assert_eq!(a, b);
    }
}
