use std::fmt::Write as _;

use crate::error::{dim, Result};

/// Relative tolerance under which two entries count as tied for sign canon.
const SIGN_TIE_RTOL: f64 = 1e-9;

/// Absolute eigenvalue gap under which neighboring pairs are flagged as clustered.
pub const CLUSTER_GAP: f64 = 1e-6;

/// Leading eigenpairs of a symmetric matrix, eigenvalues in descending order.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenPairs {
    pub eigenvalues: Vec<f64>,
    /// One unit-norm column per eigenvalue, each of length n.
    pub eigenvectors: Vec<Vec<f64>>,
    /// `‖A·u − λ·u‖₂` per pair.
    pub residuals: Vec<f64>,
    /// Pairs whose eigenvalue lies within [`CLUSTER_GAP`] of a neighboring one;
    /// only their invariant subspace is well defined.
    pub clustered: Vec<bool>,
}

impl EigenPairs {
    pub fn t(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn n(&self) -> usize {
        self.eigenvectors.first().map_or(0, Vec::len)
    }

    pub fn vector(&self, k: usize) -> &[f64] {
        &self.eigenvectors[k]
    }

    /// `‖UᵀU − I‖_max`.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..self.t() {
            for b in a..self.t() {
                let d: f64 = self.eigenvectors[a].iter().zip(&self.eigenvectors[b]).map(|(x, y)| x * y).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((d - target).abs());
            }
        }
        worst
    }

    /// First `t` pairs.
    pub fn truncated(&self, t: usize) -> Result<Self> {
        if t > self.t() {
            return Err(dim(format!("cannot keep {t} of {} pairs", self.t())));
        }
        Ok(Self {
            eigenvalues: self.eigenvalues[..t].to_vec(),
            eigenvectors: self.eigenvectors[..t].to_vec(),
            residuals: self.residuals[..t].to_vec(),
            clustered: self.clustered[..t].to_vec(),
        })
    }

    /// CSV with a header row of eigenvalues and one row per node.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self.eigenvalues.iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for i in 0..self.n() {
            for (k, col) in self.eigenvectors.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write!(out, "{:?}", col[i]).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Flips `v` so its largest-magnitude entry is positive; near-ties go to the
/// lowest index.
pub fn canonicalize_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if max == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .position(|x| x.abs() >= max * (1.0 - SIGN_TIE_RTOL))
        .expect("max is attained");
    if v[pivot] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Flags pairs closer than [`CLUSTER_GAP`] to a neighbor. `next` is the
/// eigenvalue just below the last returned one, when known.
pub(crate) fn cluster_flags(values: &[f64], next: Option<f64>) -> Vec<bool> {
    let t = values.len();
    (0..t)
        .map(|i| {
            let above = i > 0 && (values[i - 1] - values[i]).abs() < CLUSTER_GAP;
            let below_val = if i + 1 < t { Some(values[i + 1]) } else { next };
            let below = below_val.is_some_and(|b| (values[i] - b).abs() < CLUSTER_GAP);
            above || below
        })
        .collect()
}
