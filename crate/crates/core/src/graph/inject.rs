//! Seeded anomaly injection: dense cliques and distant-feature swaps.

use rand::seq::index::sample;

use crate::error::{param, Result};
use crate::graph::{FeatureMatrix, SparseGraph};
use crate::rng::stream;
use crate::tensor::DenseMatrix;

/// Turns `p` disjoint random sets of `m` nodes into cliques and labels them.
pub fn inject_structural_anomalies(g: &SparseGraph, p: usize, m: usize, seed: u64) -> Result<(SparseGraph, Vec<bool>)> {
    if m < 2 {
        return Err(param("m", format!("clique size must be at least 2, got {m}")));
    }
    if p * m > g.n() {
        return Err(param("p", format!("{p} cliques of {m} exceed {} nodes", g.n())));
    }
    let mut labels = vec![false; g.n()];
    if p == 0 {
        return Ok((g.clone(), labels));
    }
    let mut rng = stream(seed, "inject-structural");
    let chosen = sample(&mut rng, g.n(), p * m).into_vec();
    let mut extra = Vec::new();
    for clique in chosen.chunks(m) {
        for (a, &i) in clique.iter().enumerate() {
            labels[i] = true;
            for &j in &clique[a + 1..] {
                extra.push((i, j));
            }
        }
    }
    Ok((g.with_edges(extra)?, labels))
}

/// Replaces `q` random rows with the farthest (Euclidean) of `k` other
/// randomly sampled original rows.
pub fn inject_contextual_anomalies(
    g: &SparseGraph,
    x: &FeatureMatrix,
    q: usize,
    k: usize,
    seed: u64,
) -> Result<(FeatureMatrix, Vec<bool>)> {
    if x.n() != g.n() {
        return Err(crate::error::dim(format!("{} feature rows for {} nodes", x.n(), g.n())));
    }
    inject_contextual_excluding(x, q, k, seed, &vec![false; x.n()])
}

/// As [`inject_contextual_anomalies`], never targeting nodes flagged in `exclude`.
pub fn inject_contextual_excluding(
    x: &FeatureMatrix,
    q: usize,
    k: usize,
    seed: u64,
    exclude: &[bool],
) -> Result<(FeatureMatrix, Vec<bool>)> {
    let n = x.n();
    let eligible: Vec<usize> = (0..n).filter(|&i| !exclude[i]).collect();
    if q > eligible.len() {
        return Err(param("q", format!("{q} contextual anomalies exceed {} eligible nodes", eligible.len())));
    }
    if k == 0 {
        return Err(param("k", "candidate pool must be at least 1"));
    }
    let mut labels = vec![false; n];
    if q == 0 {
        return Ok((x.clone(), labels));
    }
    if n < 2 {
        return Err(param("q", "need at least two nodes to swap features"));
    }
    let k = k.min(n - 1);
    let mut rng = stream(seed, "inject-contextual");
    let targets: Vec<usize> = sample(&mut rng, eligible.len(), q).into_iter().map(|t| eligible[t]).collect();
    let orig = x.as_dense();
    let mut out: DenseMatrix = orig.clone();
    for &t in &targets {
        // Sample k distinct nodes other than t by drawing from n-1 slots.
        let pool = sample(&mut rng, n - 1, k);
        let mut best = (f64::NEG_INFINITY, t);
        for c in pool.iter() {
            let c = if c >= t { c + 1 } else { c };
            let dist: f64 = orig.row(t).iter().zip(orig.row(c)).map(|(a, b)| (a - b) * (a - b)).sum();
            if dist > best.0 {
                best = (dist, c);
            }
        }
        out.row_mut(t).copy_from_slice(orig.row(best.1));
        labels[t] = true;
    }
    Ok((FeatureMatrix::new(out)?, labels))
}
