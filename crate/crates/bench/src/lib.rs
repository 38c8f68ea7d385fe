//! Shared fixtures for the benchmarks.

use neigad_core::graph::{generate_synthetic, BenchmarkSpec, SbmParams};
use neigad_core::{AttributedGraph, SparseGraph};

/// SBM with `n` nodes, 10 blocks and expected degree 10.
pub fn sbm_graph(n: usize, seed: u64) -> SparseGraph {
    generate_synthetic(&SbmParams::with_avg_degree(n, 10, 10.0, 0.8, 1, seed))
        .expect("valid parameters")
        .graph
}

/// Labeled benchmark graph with 32 features and 5% anomalies.
pub fn labeled(n: usize, seed: u64) -> AttributedGraph {
    BenchmarkSpec::standard(n, 32, 4, 10.0, 0.05, 5)
        .build(seed)
        .expect("valid parameters")
}
