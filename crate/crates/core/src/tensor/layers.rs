//! GCN and fully connected layers with hand-derived backward passes.

use serde::{Deserialize, Serialize};

use super::dense::DenseMatrix;
use super::sparse::CsrMatrix;
use crate::error::{dim, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Identity,
    Sigmoid,
}

impl Activation {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => x.max(0.0),
            Activation::Identity => x,
            Activation::Sigmoid => 1.0 / (1.0 + (-x).exp()),
        }
    }

    /// Derivative given the pre-activation `x` and the activated value `y`.
    #[inline]
    fn derivative(self, x: f64, y: f64) -> f64 {
        match self {
            Activation::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Identity => 1.0,
            Activation::Sigmoid => y * (1.0 - y),
        }
    }
}

/// Intermediate values kept from a forward pass for the backward pass.
#[derive(Clone, Debug)]
pub struct LayerCache {
    /// Layer input after propagation (`op · H` for GCN, `H` otherwise).
    propagated: DenseMatrix,
    pre: DenseMatrix,
    out: DenseMatrix,
}

impl LayerCache {
    pub fn output(&self) -> &DenseMatrix {
        &self.out
    }
}

/// Gradients of a scalar loss with respect to one layer's parameters and input.
#[derive(Clone, Debug)]
pub struct LayerGradients {
    pub weight: DenseMatrix,
    pub bias: Option<Vec<f64>>,
    /// `None` when the caller did not ask for it (first layer).
    pub input: Option<DenseMatrix>,
}

fn activate(pre: &DenseMatrix, act: Activation) -> DenseMatrix {
    let mut out = pre.clone();
    out.as_mut_slice().iter_mut().for_each(|v| *v = act.apply(*v));
    out
}

fn pre_activation_grad(cache: &LayerCache, act: Activation, grad_out: &DenseMatrix) -> Result<DenseMatrix> {
    cache.out.check_same_shape(grad_out, "output gradient")?;
    let mut g = grad_out.clone();
    for ((g, &x), &y) in g
        .as_mut_slice()
        .iter_mut()
        .zip(cache.pre.as_slice())
        .zip(cache.out.as_slice())
    {
        *g *= act.derivative(x, y);
    }
    Ok(g)
}

/// Forward pass of `act(op · H · W)`.
pub fn gcn_forward(op: &CsrMatrix, h: &DenseMatrix, w: &DenseMatrix, act: Activation) -> Result<LayerCache> {
    gcn_forward_propagated(op.spmm(h)?, w, act)
}

/// [`gcn_forward`] with `op · H` already computed.
pub fn gcn_forward_propagated(propagated: DenseMatrix, w: &DenseMatrix, act: Activation) -> Result<LayerCache> {
    let pre = propagated.matmul(w)?;
    let out = activate(&pre, act);
    Ok(LayerCache {
        propagated,
        pre,
        out,
    })
}

/// Output of a GCN layer.
pub fn gcn_layer(op: &CsrMatrix, h: &DenseMatrix, w: &DenseMatrix, act: Activation) -> Result<DenseMatrix> {
    Ok(gcn_forward(op, h, w, act)?.out)
}

/// Maps `∂L/∂out` to `∂L/∂W` and, if `need_input`, `∂L/∂H` for a GCN layer.
pub fn gcn_backward(
    op: &CsrMatrix,
    w: &DenseMatrix,
    act: Activation,
    cache: &LayerCache,
    grad_out: &DenseMatrix,
    need_input: bool,
) -> Result<LayerGradients> {
    let g_pre = pre_activation_grad(cache, act, grad_out)?;
    let weight = cache.propagated.t_matmul(&g_pre)?;
    let input = if need_input {
        Some(op.spmm_t(&g_pre.matmul_t(w)?)?)
    } else {
        None
    };
    Ok(LayerGradients {
        weight,
        bias: None,
        input,
    })
}

/// Forward pass of `act(H · W + b)`; `b` is broadcast over rows.
pub fn mlp_forward(h: &DenseMatrix, w: &DenseMatrix, b: Option<&[f64]>, act: Activation) -> Result<LayerCache> {
    let mut pre = h.matmul(w)?;
    if let Some(b) = b {
        if b.len() != w.cols() {
            return Err(dim(format!("bias of length {} for width {}", b.len(), w.cols())));
        }
        for i in 0..pre.rows() {
            for (p, &bj) in pre.row_mut(i).iter_mut().zip(b) {
                *p += bj;
            }
        }
    }
    let out = activate(&pre, act);
    Ok(LayerCache {
        propagated: h.clone(),
        pre,
        out,
    })
}

pub fn mlp_layer(h: &DenseMatrix, w: &DenseMatrix, b: Option<&[f64]>, act: Activation) -> Result<DenseMatrix> {
    Ok(mlp_forward(h, w, b, act)?.out)
}

pub fn mlp_backward(
    w: &DenseMatrix,
    has_bias: bool,
    act: Activation,
    cache: &LayerCache,
    grad_out: &DenseMatrix,
    need_input: bool,
) -> Result<LayerGradients> {
    let g_pre = pre_activation_grad(cache, act, grad_out)?;
    let weight = cache.propagated.t_matmul(&g_pre)?;
    let bias = has_bias.then(|| {
        let mut b = vec![0.0; g_pre.cols()];
        for i in 0..g_pre.rows() {
            for (b, &g) in b.iter_mut().zip(g_pre.row(i)) {
                *b += g;
            }
        }
        b
    });
    let input = if need_input { Some(g_pre.matmul_t(w)?) } else { None };
    Ok(LayerGradients {
        weight,
        bias,
        input,
    })
}
