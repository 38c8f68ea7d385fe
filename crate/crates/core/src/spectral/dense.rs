use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::SparseGraph;
use crate::spectral::eigenpairs::{canonicalize_sign, cluster_flags, EigenPairs};

pub const DENSE_ORACLE_LIMIT: usize = 1024;

/// Full spectrum of the adjacency by dense symmetric decomposition,
/// descending, sign-canonical. Verification oracle for small graphs only.
pub fn dense_eig_oracle(g: &SparseGraph) -> Result<EigenPairs> {
    let n = g.n();
    if n > DENSE_ORACLE_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: DENSE_ORACLE_LIMIT,
        });
    }
    let dense = g.to_dense();
    let eig = SymmetricEigen::new(DMatrix::from_row_slice(n, n, dense.as_slice()));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut eigenvectors = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    let mut av = vec![0.0; n];
    for (&k, &lambda) in order.iter().zip(&eigenvalues) {
        let mut u: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
        canonicalize_sign(&mut u);
        g.matvec(&u, &mut av);
        residuals.push(av.iter().zip(&u).map(|(a, x)| (a - lambda * x).powi(2)).sum::<f64>().sqrt());
        eigenvectors.push(u);
    }
    let clustered = cluster_flags(&eigenvalues, None);
    Ok(EigenPairs {
        eigenvalues,
        eigenvectors,
        residuals,
        clustered,
    })
}
