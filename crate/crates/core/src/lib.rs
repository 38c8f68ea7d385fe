//! Spectral neighbor-information augmentation for reconstruction-based graph
//! anomaly detection.
//!
//! The pipeline: load or generate an attributed graph, compute the top
//! adjacency eigenvectors with a restarted Lanczos solver, append them to the
//! node features, train an autoencoder detector (MLPAE, GCNAE or DOMINANT) and
//! rank nodes by reconstruction error.

pub mod error;
pub mod eval;
pub mod graph;
pub mod models;
pub mod rng;
pub mod spectral;
pub mod tensor;

pub use error::{Error, Result};
pub use eval::EvalReport;
pub use graph::{AttributedGraph, FeatureMatrix, SparseGraph};
pub use models::{ModelKind, ModelParams, TrainConfig};
pub use spectral::{EigenConfig, EigenPairs};
pub use tensor::{CsrMatrix, DenseMatrix};
