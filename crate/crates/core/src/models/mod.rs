//! Reconstruction detectors (MLPAE, GCNAE, DOMINANT), training and comparison.

pub mod compare;
pub mod forward;
pub mod params;
pub mod train;

pub use compare::{evaluate_outcome, run_comparison, Comparison};
pub use forward::{
    factored_node_scores, loss_and_gradients, model_forward, node_scores, reconstruction_loss,
    structure_loss, LossGradient, Reconstruction,
};
pub use params::{Layer, LayerKind, ModelKind, ModelParams};
pub use train::{train, AnomalyScores, TrainConfig, TrainOutcome};
