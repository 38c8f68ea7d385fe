//! Adjacency eigenpairs, feature augmentation, and neighbor-information checks.

pub mod augment;
pub mod dense;
pub mod eigenpairs;
mod jacobi;
pub mod lanczos;
pub mod verify;

pub use augment::{augment_features, unit_rms_scale, AugmentedFeatures};
pub use dense::{dense_eig_oracle, DENSE_ORACLE_LIMIT};
pub use eigenpairs::{canonicalize_sign, EigenPairs, CLUSTER_GAP};
pub use lanczos::{top_eigenpairs, top_eigenpairs_op, EigenConfig, SymmetricOperator, Which};
pub use verify::{
    concat_loss_additivity_check, neighbor_average_residual, ni_score, Additivity, NiScore,
    DEFAULT_LAMBDA_FLOOR,
};
