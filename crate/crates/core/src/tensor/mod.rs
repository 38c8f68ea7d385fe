//! Dense/sparse kernels, neural layers with analytic gradients, and Adam.

pub mod adam;
pub mod dense;
pub mod gradcheck;
pub mod layers;
pub mod sparse;

pub use adam::{adam_step, AdamConfig, AdamState, ParamGrad};
pub use dense::DenseMatrix;
pub use gradcheck::finite_diff_check;
pub use layers::{
    gcn_backward, gcn_forward, gcn_forward_propagated, gcn_layer, mlp_backward, mlp_forward, mlp_layer, Activation,
    LayerCache, LayerGradients,
};
pub use sparse::{spmm, CsrMatrix};
