//! Stochastic-block graphs with community-mean Gaussian features.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{param, Result};
use crate::graph::inject::{inject_contextual_excluding, inject_structural_anomalies};
use crate::graph::{AttributedGraph, FeatureMatrix, SparseGraph};
use crate::rng::{stream, StreamRng};
use crate::tensor::DenseMatrix;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SbmParams {
    pub n: usize,
    pub blocks: usize,
    pub p_in: f64,
    pub p_out: f64,
    pub d: usize,
    pub seed: u64,
}

impl SbmParams {
    /// Chooses `p_in`/`p_out` so the expected degree is `avg_degree`, with
    /// `in_fraction` of each node's expected edges inside its own block.
    pub fn with_avg_degree(n: usize, blocks: usize, avg_degree: f64, in_fraction: f64, d: usize, seed: u64) -> Self {
        let block = n as f64 / blocks as f64;
        let inside = (block - 1.0).max(1.0);
        let outside = (n as f64 - block).max(1.0);
        let p_in = (avg_degree * in_fraction / inside).min(1.0);
        let p_out = if blocks > 1 {
            (avg_degree * (1.0 - in_fraction) / outside).min(p_in)
        } else {
            0.0
        };
        Self { n, blocks, p_in, p_out, d, seed }
    }
}

/// Community of node `i` when `n` nodes are split into `blocks` contiguous
/// blocks, the first `n % blocks` one node larger.
pub fn block_of(i: usize, n: usize, blocks: usize) -> usize {
    let base = n / blocks;
    let extra = n % blocks;
    let big = extra * (base + 1);
    if i < big {
        i / (base + 1)
    } else {
        extra + (i - big) / base
    }
}

fn block_range(b: usize, n: usize, blocks: usize) -> std::ops::Range<usize> {
    let base = n / blocks;
    let extra = n % blocks;
    let start = b * base + b.min(extra);
    start..start + base + usize::from(b < extra)
}

/// Visits a Bernoulli(p) subset of `0..total` using geometric skips.
fn sample_indices(rng: &mut StreamRng, total: usize, p: f64, mut visit: impl FnMut(usize)) {
    if p <= 0.0 || total == 0 {
        return;
    }
    if p >= 1.0 {
        (0..total).for_each(visit);
        return;
    }
    let log_q = (1.0 - p).ln();
    let mut pos: usize = 0;
    loop {
        let u: f64 = 1.0 - rng.gen::<f64>();
        let skip = (u.ln() / log_q).floor();
        if skip >= (total - pos) as f64 {
            return;
        }
        pos += skip as usize;
        visit(pos);
        pos += 1;
        if pos >= total {
            return;
        }
    }
}

pub fn generate_synthetic(params: &SbmParams) -> Result<AttributedGraph> {
    let SbmParams { n, blocks, p_in, p_out, d, seed } = *params;
    if !(0.0..=1.0).contains(&p_in) || !(0.0..=1.0).contains(&p_out) || p_out > p_in {
        return Err(param("p_in/p_out", format!("need 0 ≤ p_out ≤ p_in ≤ 1, got p_in={p_in}, p_out={p_out}")));
    }
    if blocks == 0 || blocks > n {
        return Err(param("blocks", format!("need 1 ≤ blocks ≤ n, got {blocks} for n={n}")));
    }

    let mut rng = stream(seed, "sbm-edges");
    let mut edges = Vec::new();
    for a in 0..blocks {
        let ra = block_range(a, n, blocks);
        // Within-block pairs i < j, enumerated row by row.
        let len = ra.len();
        let mut row_start = Vec::with_capacity(len + 1);
        let mut acc = 0usize;
        for r in 0..len {
            row_start.push(acc);
            acc += len - r - 1;
        }
        row_start.push(acc);
        sample_indices(&mut rng, acc, p_in, |k| {
            let r = row_start.partition_point(|&s| s <= k) - 1;
            let c = r + 1 + (k - row_start[r]);
            edges.push((ra.start + r, ra.start + c));
        });
        for b in a + 1..blocks {
            let rb = block_range(b, n, blocks);
            let width = rb.len();
            sample_indices(&mut rng, len * width, p_out, |k| {
                edges.push((ra.start + k / width, rb.start + k % width));
            });
        }
    }
    let graph = SparseGraph::from_edges(n, edges)?;

    let mut frng = stream(seed, "sbm-features");
    let means: Vec<Vec<f64>> = (0..blocks)
        .map(|_| (0..d).map(|_| StandardNormal.sample(&mut frng)).collect())
        .collect();
    let x = DenseMatrix::from_fn(n, d, |i, j| {
        let noise: f64 = StandardNormal.sample(&mut frng);
        means[block_of(i, n, blocks)][j] + noise
    });
    AttributedGraph::new(graph, FeatureMatrix::new(x)?, None)
}

/// Synthetic benchmark: an SBM with clique and feature-swap anomalies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchmarkSpec {
    pub sbm: SbmParams,
    pub cliques: usize,
    pub clique_size: usize,
    pub contextual: usize,
    pub candidates: usize,
}

impl BenchmarkSpec {
    /// `n` nodes, `blocks` communities, expected degree `avg_degree`, and
    /// `anomaly_rate · n` anomalies split evenly between cliques of
    /// `clique_size` and contextual swaps.
    pub fn standard(n: usize, d: usize, blocks: usize, avg_degree: f64, anomaly_rate: f64, clique_size: usize) -> Self {
        let total = (anomaly_rate * n as f64).round() as usize;
        let structural = total / 2;
        let cliques = structural / clique_size;
        Self {
            sbm: SbmParams::with_avg_degree(n, blocks, avg_degree, 0.8, d, 0),
            cliques,
            clique_size,
            contextual: total - cliques * clique_size,
            candidates: 50,
        }
    }

    /// Builds the labeled graph for `seed`. Contextual targets are drawn from
    /// nodes not already in a clique.
    pub fn build(&self, seed: u64) -> Result<AttributedGraph> {
        let base = generate_synthetic(&SbmParams { seed, ..self.sbm })?;
        inject_anomalies(&base, self.cliques, self.clique_size, self.contextual, self.candidates, seed)
    }
}

/// Injects `cliques` cliques of `clique_size` nodes, then `contextual`
/// feature swaps (pool of `candidates`) on nodes outside the cliques.
/// Labels mark both kinds; any labels on `base` are discarded.
pub fn inject_anomalies(
    base: &AttributedGraph,
    cliques: usize,
    clique_size: usize,
    contextual: usize,
    candidates: usize,
    seed: u64,
) -> Result<AttributedGraph> {
    let (graph, mut labels) = inject_structural_anomalies(&base.graph, cliques, clique_size, seed)?;
    let (features, ctx) = inject_contextual_excluding(&base.features, contextual, candidates, seed, &labels)?;
    for (l, c) in labels.iter_mut().zip(ctx) {
        *l |= c;
    }
    AttributedGraph::new(graph, features, Some(labels))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sbm(n: usize, blocks: usize, p_in: f64, p_out: f64, seed: u64) -> SbmParams {
        SbmParams { n, blocks, p_in, p_out, d: 3, seed }
    }

    #[test]
    fn block_layout() {
        let n = 10;
        let blocks = 3;
        let from_ranges: Vec<usize> = (0..blocks)
            .flat_map(|b| block_range(b, n, blocks).map(move |_| b))
            .collect();
        let direct: Vec<usize> = (0..n).map(|i| block_of(i, n, blocks)).collect();
        assert_eq!(from_ranges, direct);
        assert_eq!(direct, vec![0, 0, 0, 0, 1, 1, 1, 2, 2, 2]);
    }

    #[test]
    fn complete_blocks_without_cross_edges() {
        let g = generate_synthetic(&sbm(4, 2, 1.0, 0.0, 1)).unwrap().graph;
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (2, 3)]);
    }

    #[test]
    fn zero_probabilities_give_no_edges() {
        let g = generate_synthetic(&sbm(30, 3, 0.0, 0.0, 1)).unwrap().graph;
        assert_eq!(g.num_edges(), 0);
    }

    #[test]
    fn complete_graph_when_both_one() {
        let g = generate_synthetic(&sbm(7, 2, 1.0, 1.0, 1)).unwrap().graph;
        assert_eq!(g.num_edges(), 21);
    }

    #[test]
    fn parameter_errors() {
        assert!(generate_synthetic(&sbm(4, 2, 0.2, 0.5, 1)).is_err());
        assert!(generate_synthetic(&sbm(4, 2, 1.2, 0.5, 1)).is_err());
        assert!(generate_synthetic(&sbm(4, 0, 0.2, 0.1, 1)).is_err());
        assert!(generate_synthetic(&sbm(4, 5, 0.2, 0.1, 1)).is_err());
    }

    #[test]
    fn deterministic_given_seed() {
        let a = generate_synthetic(&sbm(60, 3, 0.3, 0.05, 9)).unwrap();
        let b = generate_synthetic(&sbm(60, 3, 0.3, 0.05, 9)).unwrap();
        let c = generate_synthetic(&sbm(60, 3, 0.3, 0.05, 10)).unwrap();
        assert_eq!(a.graph, b.graph);
        assert_eq!(a.features, b.features);
        assert_ne!(a.graph, c.graph);
    }

    #[test]
    fn within_block_density_monte_carlo() {
        let (n, blocks) = (40, 2);
        let mut hits = 0usize;
        let mut pairs = 0usize;
        let mut cross = 0usize;
        for seed in 0..50 {
            let g = generate_synthetic(&sbm(n, blocks, 0.3, 0.02, seed)).unwrap().graph;
            assert!(g.is_symmetric());
            for i in 0..n {
                for j in i + 1..n {
                    if block_of(i, n, blocks) == block_of(j, n, blocks) {
                        pairs += 1;
                        hits += usize::from(g.has_edge(i, j));
                    } else {
                        cross += usize::from(g.has_edge(i, j));
                    }
                }
            }
        }
        let density = hits as f64 / pairs as f64;
        assert!((density - 0.3).abs() <= 0.05, "{density}");
        let cross_density = cross as f64 / (50.0 * 400.0);
        assert!((cross_density - 0.02).abs() <= 0.01, "{cross_density}");
    }

    #[test]
    fn avg_degree_parametrization() {
        let p = SbmParams::with_avg_degree(2000, 10, 10.0, 0.8, 2, 3);
        let g = generate_synthetic(&p).unwrap().graph;
        let avg = 2.0 * g.num_edges() as f64 / 2000.0;
        assert!((avg - 10.0).abs() < 0.5, "{avg}");
    }

    #[test]
    fn benchmark_labels_split_evenly() {
        let spec = BenchmarkSpec::standard(200, 8, 4, 8.0, 0.05, 5);
        assert_eq!((spec.cliques, spec.contextual), (1, 5));
        let ds = spec.build(3).unwrap();
        let labels = ds.labels.unwrap();
        assert_eq!(labels.iter().filter(|&&l| l).count(), 10);
    }
}
