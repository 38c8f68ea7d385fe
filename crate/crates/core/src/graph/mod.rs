//! Graph storage, ingestion, synthetic generation and anomaly injection.

pub mod features;
pub mod inject;
pub mod io;
pub mod sparse_graph;
pub mod synth;

pub use features::{AttributedGraph, FeatureMatrix};
pub use inject::{inject_contextual_anomalies, inject_structural_anomalies};
pub use io::{load_features_csv, load_labels, parse_edge_list, parse_matrix_market, read_graph};
pub use sparse_graph::{normalized_adjacency, SparseGraph};
pub use synth::{generate_synthetic, inject_anomalies, BenchmarkSpec, SbmParams};
