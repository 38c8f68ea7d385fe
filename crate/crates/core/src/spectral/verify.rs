//! Executable checks of the neighbor-averaging identity and the additivity of
//! appended-column reconstruction losses, plus the iterated-adjacency score.

use crate::error::{dim, param, Result};
use crate::graph::SparseGraph;
use crate::spectral::eigenpairs::EigenPairs;
use crate::tensor::DenseMatrix;

pub const DEFAULT_LAMBDA_FLOOR: f64 = 1e-6;

/// For each pair, `max_j |u_j − (1/λ) Σ_{k∈N(j)} u_k|` over non-isolated
/// nodes `j`. Pairs with `|λ| < lambda_floor` are `None` (skipped).
pub fn neighbor_average_residual(g: &SparseGraph, pairs: &EigenPairs, lambda_floor: f64) -> Result<Vec<Option<f64>>> {
    if pairs.t() > 0 && pairs.n() != g.n() {
        return Err(dim(format!("eigenvectors of length {} for {} nodes", pairs.n(), g.n())));
    }
    Ok(pairs
        .eigenvalues
        .iter()
        .zip(&pairs.eigenvectors)
        .map(|(&lambda, u)| {
            if lambda.abs() < lambda_floor {
                return None;
            }
            let worst = (0..g.n())
                .filter(|&j| g.degree(j) > 0)
                .map(|j| {
                    let s: f64 = g.neighbors(j).iter().map(|&k| u[k]).sum();
                    (u[j] - s / lambda).abs()
                })
                .fold(0.0f64, f64::max);
            Some(worst)
        })
        .collect())
}

/// Neighbor-information score of one eigenvector: `u′ = A⁴u`,
/// `per_node[j] = (u_j − u′_j)²`.
#[derive(Clone, Debug, PartialEq)]
pub struct NiScore {
    pub per_node: Vec<f64>,
    pub total: f64,
    /// `(1 − λ⁴)²`, the total an exact unit eigenpair would produce.
    pub exact_pair_total: f64,
}

pub fn ni_score(g: &SparseGraph, u: &[f64], lambda: f64) -> Result<NiScore> {
    if u.len() != g.n() {
        return Err(dim(format!("vector of length {} for {} nodes", u.len(), g.n())));
    }
    let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(param("u", format!("expected a unit vector, norm is {norm}")));
    }
    let mut cur = u.to_vec();
    let mut next = vec![0.0; u.len()];
    for _ in 0..4 {
        g.matvec(&cur, &mut next);
        std::mem::swap(&mut cur, &mut next);
    }
    let per_node: Vec<f64> = u.iter().zip(&cur).map(|(a, b)| (a - b) * (a - b)).collect();
    let total = per_node.iter().sum();
    Ok(NiScore {
        per_node,
        total,
        exact_pair_total: (1.0 - lambda.powi(4)).powi(2),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Additivity {
    /// `‖(X‖U) − (X′‖U′)‖_F²`
    pub lhs: f64,
    /// `‖X − X′‖_F² + Σ_k ‖u_k − u′_k‖²`
    pub rhs: f64,
    pub gap: f64,
}

impl Additivity {
    pub fn relative_gap(&self) -> f64 {
        self.gap / (1.0 + self.rhs)
    }
}

/// Compares the loss of the concatenated matrices with the sum of the
/// feature loss and the per-column eigenvector losses.
pub fn concat_loss_additivity_check(
    x: &DenseMatrix,
    x_rec: &DenseMatrix,
    u: &DenseMatrix,
    u_rec: &DenseMatrix,
) -> Result<Additivity> {
    x.check_same_shape(x_rec, "feature reconstruction")?;
    u.check_same_shape(u_rec, "eigenvector reconstruction")?;
    if x.rows() != u.rows() {
        return Err(dim(format!("{} feature rows vs {} eigenvector rows", x.rows(), u.rows())));
    }
    let lhs = x.hcat(u)?.sub(&x_rec.hcat(u_rec)?)?.frobenius_sq();
    let feature = x.sub(x_rec)?.frobenius_sq();
    let columns: f64 = (0..u.cols())
        .map(|k| (0..u.rows()).map(|i| (u.get(i, k) - u_rec.get(i, k)).powi(2)).sum::<f64>())
        .sum();
    let rhs = feature + columns;
    Ok(Additivity {
        lhs,
        rhs,
        gap: (lhs - rhs).abs(),
    })
}
