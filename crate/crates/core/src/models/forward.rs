//! Forward pass, reconstruction loss and per-node scores.
//!
//! The dense functions (`model_forward`, `reconstruction_loss`,
//! `node_scores`) materialize `A′ = ZZᵀ` and are meant for small graphs and
//! as references. Training uses [`loss_and_gradients`] and
//! [`factored_node_scores`], which expand `‖A − ZZᵀ‖²` as
//! `‖A‖² − 2·tr(ZᵀAZ) + ‖ZᵀZ‖²` and never form an `n × n` matrix.

use crate::error::{dim, param, Result};
use crate::graph::SparseGraph;
use crate::models::params::{LayerKind, ModelKind, ModelParams};
use crate::tensor::{
    gcn_backward, gcn_forward, gcn_forward_propagated, mlp_backward, mlp_forward, CsrMatrix, DenseMatrix, LayerCache,
};

/// Outputs of one forward pass.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub z: DenseMatrix,
    /// `ZZᵀ`, produced only by models with a structure decoder.
    pub a_rec: Option<DenseMatrix>,
    pub x_rec: DenseMatrix,
}

pub(crate) struct CachedForward {
    pub caches: Vec<LayerCache>,
    pub n_encoder: usize,
}

impl CachedForward {
    pub fn z(&self) -> &DenseMatrix {
        self.caches[self.n_encoder - 1].output()
    }

    pub fn x_rec(&self) -> &DenseMatrix {
        self.caches.last().unwrap().output()
    }
}

/// `x_prop`, when given, must equal `op · x_in`; it spares the first GCN layer
/// a propagation that is constant across epochs.
pub(crate) fn forward_cached(
    op: &CsrMatrix,
    x_in: &DenseMatrix,
    x_prop: Option<&DenseMatrix>,
    params: &ModelParams,
) -> Result<CachedForward> {
    if x_in.cols() != params.input_width() {
        return Err(dim(format!(
            "input width {} but model expects {}",
            x_in.cols(),
            params.input_width()
        )));
    }
    let mut caches: Vec<LayerCache> = Vec::with_capacity(params.encoder.len() + params.decoder.len());
    for (idx, layer) in params.layers().enumerate() {
        let input = caches.last().map_or(x_in, |c| c.output());
        let cache = match (layer.kind, x_prop) {
            (LayerKind::Gcn, Some(p)) if idx == 0 => gcn_forward_propagated(p.clone(), &layer.weight, layer.activation)?,
            (LayerKind::Gcn, _) => gcn_forward(op, input, &layer.weight, layer.activation)?,
            (LayerKind::Dense, _) => mlp_forward(input, &layer.weight, layer.bias.as_deref(), layer.activation)?,
        };
        caches.push(cache);
    }
    Ok(CachedForward {
        caches,
        n_encoder: params.encoder.len(),
    })
}

/// Encoder, structure decoder (`ZZᵀ`) when the model has one, and attribute
/// decoder. `op` is the normalized adjacency; MLP layers ignore it.
pub fn model_forward(kind: ModelKind, op: &CsrMatrix, x_in: &DenseMatrix, params: &ModelParams) -> Result<Reconstruction> {
    if params.kind != kind {
        return Err(param("kind", format!("parameters are for {}, not {kind}", params.kind)));
    }
    let fwd = forward_cached(op, x_in, None, params)?;
    let z = fwd.z().clone();
    let a_rec = if kind.reconstructs_structure() {
        Some(z.matmul_t(&z)?)
    } else {
        None
    };
    Ok(Reconstruction {
        a_rec,
        x_rec: fwd.x_rec().clone(),
        z,
    })
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(param("alpha", format!("must lie in [0, 1], got {alpha}")));
    }
    Ok(())
}

/// `(1−α)‖A − A′‖_F² + α‖X − X′‖_F²`. Without `a_rec` the structure term is
/// absent and `α` is taken as 1.
pub fn reconstruction_loss(
    a: &DenseMatrix,
    a_rec: Option<&DenseMatrix>,
    x: &DenseMatrix,
    x_rec: &DenseMatrix,
    alpha: f64,
) -> Result<f64> {
    check_alpha(alpha)?;
    let attr = x.sub(x_rec)?.frobenius_sq();
    match a_rec {
        Some(a_rec) => Ok((1.0 - alpha) * a.sub(a_rec)?.frobenius_sq() + alpha * attr),
        None => Ok(attr),
    }
}

/// `score_i = (1−α)‖A[i,:] − A′[i,:]‖₂ + α‖X[i,:] − X′[i,:]‖₂`.
pub fn node_scores(
    a: &DenseMatrix,
    a_rec: Option<&DenseMatrix>,
    x: &DenseMatrix,
    x_rec: &DenseMatrix,
    alpha: f64,
) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    x.check_same_shape(x_rec, "attribute reconstruction")?;
    let row_err = |m: &DenseMatrix, r: &DenseMatrix, i: usize| {
        m.row(i).iter().zip(r.row(i)).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
    };
    let structure = match a_rec {
        Some(ar) => {
            a.check_same_shape(ar, "structure reconstruction")?;
            if a.rows() != x.rows() {
                return Err(dim("structure and attribute row counts differ"));
            }
            Some(ar)
        }
        None => None,
    };
    Ok((0..x.rows())
        .map(|i| {
            let xe = row_err(x, x_rec, i);
            match structure {
                Some(ar) => (1.0 - alpha) * row_err(a, ar, i) + alpha * xe,
                None => xe,
            }
        })
        .collect())
}

/// Squared row errors `‖A[i,:] − (ZZᵀ)[i,:]‖²` without forming `ZZᵀ`.
pub fn structure_row_errors(g: &SparseGraph, z: &DenseMatrix) -> Result<Vec<f64>> {
    if z.rows() != g.n() {
        return Err(dim(format!("{} embedding rows for {} nodes", z.rows(), g.n())));
    }
    let gram = z.t_matmul(z)?;
    let zg = z.matmul(&gram)?;
    Ok((0..g.n())
        .map(|i| {
            let zi = z.row(i);
            let cross: f64 = g
                .neighbors(i)
                .iter()
                .map(|&j| zi.iter().zip(z.row(j)).map(|(a, b)| a * b).sum::<f64>())
                .sum();
            let quad: f64 = zi.iter().zip(zg.row(i)).map(|(a, b)| a * b).sum();
            (g.degree(i) as f64 - 2.0 * cross + quad).max(0.0)
        })
        .collect())
}

/// `‖A − ZZᵀ‖_F²` via `nnz(A) − 2·tr(ZᵀAZ) + ‖ZᵀZ‖_F²`.
pub fn structure_loss(g: &SparseGraph, z: &DenseMatrix) -> Result<f64> {
    Ok(structure_row_errors(g, z)?.iter().sum())
}

/// Per-node scores as in [`node_scores`], using the factored structure error.
pub fn factored_node_scores(
    g: &SparseGraph,
    z: &DenseMatrix,
    x: &DenseMatrix,
    x_rec: &DenseMatrix,
    kind: ModelKind,
    alpha: f64,
) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    x.check_same_shape(x_rec, "attribute reconstruction")?;
    let attr: Vec<f64> = (0..x.rows())
        .map(|i| x.row(i).iter().zip(x_rec.row(i)).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt())
        .collect();
    if !kind.reconstructs_structure() {
        return Ok(attr);
    }
    let s = structure_row_errors(g, z)?;
    Ok(s.iter().zip(&attr).map(|(s, a)| (1.0 - alpha) * s.sqrt() + alpha * a).collect())
}

/// Effective balance: models without a structure decoder use α = 1.
pub fn effective_alpha(kind: ModelKind, alpha: f64) -> f64 {
    if kind.reconstructs_structure() {
        alpha
    } else {
        1.0
    }
}

/// Loss value and its gradient with respect to every parameter, flattened
/// in [`ModelParams::to_flat`] order.
pub struct LossGradient {
    pub loss: f64,
    pub grads: Vec<Vec<f64>>,
    pub z: DenseMatrix,
    pub x_rec: DenseMatrix,
}

impl LossGradient {
    pub fn flat_grad(&self) -> Vec<f64> {
        self.grads.concat()
    }
}

/// Full training loss for `params` and its exact gradient.
pub fn loss_and_gradients(
    g: &SparseGraph,
    op: &CsrMatrix,
    x_in: &DenseMatrix,
    params: &ModelParams,
    alpha: f64,
) -> Result<LossGradient> {
    loss_and_gradients_cached(g, op, x_in, None, params, alpha)
}

pub(crate) fn loss_and_gradients_cached(
    g: &SparseGraph,
    op: &CsrMatrix,
    x_in: &DenseMatrix,
    x_prop: Option<&DenseMatrix>,
    params: &ModelParams,
    alpha: f64,
) -> Result<LossGradient> {
    check_alpha(alpha)?;
    let kind = params.kind;
    let alpha = effective_alpha(kind, alpha);
    let fwd = forward_cached(op, x_in, x_prop, params)?;
    let x_rec = fwd.x_rec();
    let z = fwd.z();

    let diff = x_in.sub(x_rec)?;
    let mut loss = alpha * diff.frobenius_sq();
    let mut grad_out = diff;
    grad_out.scale(-2.0 * alpha);

    // Structure term (1−α)‖A − ZZᵀ‖² with gradient −4(1−α)(AZ − Z·ZᵀZ).
    let structure_grad = if kind.reconstructs_structure() && alpha < 1.0 {
        loss += (1.0 - alpha) * structure_loss(g, z)?;
        let az = g.adjacency_operator().spmm(z)?;
        let zg = z.matmul(&z.t_matmul(z)?)?;
        let mut gz = az.sub(&zg)?;
        gz.scale(-4.0 * (1.0 - alpha));
        Some(gz)
    } else {
        None
    };

    let layers: Vec<_> = params.layers().collect();
    let mut grads: Vec<Vec<f64>> = Vec::new();
    let mut upstream = grad_out;
    for idx in (0..layers.len()).rev() {
        let layer = layers[idx];
        if idx + 1 == fwd.n_encoder {
            if let Some(gz) = &structure_grad {
                for (u, s) in upstream.as_mut_slice().iter_mut().zip(gz.as_slice()) {
                    *u += s;
                }
            }
        }
        let cache = &fwd.caches[idx];
        let lg = match layer.kind {
            LayerKind::Gcn => gcn_backward(op, &layer.weight, layer.activation, cache, &upstream, idx > 0)?,
            LayerKind::Dense => {
                mlp_backward(&layer.weight, layer.bias.is_some(), layer.activation, cache, &upstream, idx > 0)?
            }
        };
        if let Some(b) = lg.bias {
            grads.push(b);
        }
        grads.push(lg.weight.into_vec());
        if let Some(input) = lg.input {
            upstream = input;
        }
    }
    grads.reverse();
    Ok(LossGradient {
        loss,
        grads,
        z: z.clone(),
        x_rec: x_rec.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::normalized_adjacency;
    use crate::models::params::Layer;
    use crate::tensor::Activation;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small_graph() -> SparseGraph {
        SparseGraph::from_edges(6, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)]).unwrap()
    }

    fn random(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DenseMatrix {
        DenseMatrix::from_fn(r, c, |_, _| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn identity_embedding_gives_identity_structure() {
        // Two isolated nodes, one identity GCN layer in and out.
        let eye = DenseMatrix::identity(2);
        let layer = |activation| Layer { kind: LayerKind::Gcn, activation, weight: eye.clone(), bias: None };
        let params = ModelParams {
            version: 1,
            kind: ModelKind::Dominant,
            encoder: vec![layer(Activation::Identity)],
            decoder: vec![layer(Activation::Identity)],
        };
        let op = normalized_adjacency(&SparseGraph::empty(2));
        let rec = model_forward(ModelKind::Dominant, &op, &eye, &params).unwrap();
        assert_eq!(rec.z, eye);
        assert_eq!(rec.a_rec.unwrap(), eye);
    }

    #[test]
    fn identity_mlpae_reconstructs_exactly() {
        let eye = DenseMatrix::identity(3);
        let layer = || Layer { kind: LayerKind::Dense, activation: Activation::Identity, weight: eye.clone(), bias: Some(vec![0.0; 3]) };
        let params = ModelParams { version: 1, kind: ModelKind::Mlpae, encoder: vec![layer(), layer()], decoder: vec![layer()] };
        let x = DenseMatrix::from_rows(&[[1.0, 2.0, 3.0], [-1.0, 0.5, 0.0]]).unwrap();
        let op = CsrMatrix::identity(2);
        let rec = model_forward(ModelKind::Mlpae, &op, &x, &params).unwrap();
        assert_eq!(rec.x_rec, x);
        assert!(rec.a_rec.is_none());
        assert!(model_forward(ModelKind::Gcnae, &op, &x, &params).is_err());
    }

    #[test]
    fn structure_reconstruction_is_symmetric_psd() {
        let g = small_graph();
        let op = normalized_adjacency(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random(&mut rng, 6, 5);
        let params = ModelParams::init(ModelKind::Dominant, 5, 5, 8, 3, 1).unwrap();
        let a_rec = model_forward(ModelKind::Dominant, &op, &x, &params).unwrap().a_rec.unwrap();
        assert_eq!(a_rec.sub(&a_rec.transpose()).unwrap().max_abs(), 0.0);
        let m = nalgebra::DMatrix::from_row_slice(6, 6, a_rec.as_slice());
        assert!(m.symmetric_eigenvalues().iter().all(|&v| v >= -1e-12));
    }

    #[test]
    fn loss_by_hand() {
        let a = DenseMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let x = DenseMatrix::from_rows(&[[1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert_eq!(reconstruction_loss(&a, Some(&a), &x, &x, 0.8).unwrap(), 0.0);
        let ar = DenseMatrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap(); // ‖A−A′‖² = 2
        let xr = DenseMatrix::from_rows(&[[1.0, 2.0], [0.0, 1.0]]).unwrap(); // ‖X−X′‖² = 4
        assert_eq!(reconstruction_loss(&a, Some(&ar), &x, &xr, 1.0).unwrap(), 4.0);
        assert_eq!(reconstruction_loss(&a, Some(&ar), &x, &xr, 0.5).unwrap(), 3.0);
        assert_eq!(reconstruction_loss(&a, None, &x, &xr, 0.5).unwrap(), 4.0);
        assert!(reconstruction_loss(&a, Some(&ar), &x, &xr, 1.5).is_err());
    }

    #[test]
    fn scores_cases() {
        let a = DenseMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let x = DenseMatrix::from_rows(&[[1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert_eq!(node_scores(&a, Some(&a), &x, &x, 0.3).unwrap(), vec![0.0, 0.0]);
        let xr = DenseMatrix::from_rows(&[[1.0, 0.0], [3.0, 5.0]]).unwrap();
        let s = node_scores(&a, Some(&DenseMatrix::zeros(2, 2)), &x, &xr, 1.0).unwrap();
        assert_eq!(s[0], 0.0);
        assert!(s[1] > 0.0);
    }

    #[test]
    fn scores_match_naive_loops_and_loss_terms() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = small_graph().to_dense();
        let ar = random(&mut rng, 6, 6);
        let x = random(&mut rng, 6, 3);
        let xr = random(&mut rng, 6, 3);
        let alpha = 0.7;
        let s = node_scores(&a, Some(&ar), &x, &xr, alpha).unwrap();
        let (mut s_sq, mut x_sq) = (0.0, 0.0);
        for i in 0..6 {
            let mut se = 0.0;
            for j in 0..6 {
                se += (a.get(i, j) - ar.get(i, j)).powi(2);
            }
            let mut xe = 0.0;
            for j in 0..3 {
                xe += (x.get(i, j) - xr.get(i, j)).powi(2);
            }
            s_sq += se;
            x_sq += xe;
            let expect = (1.0 - alpha) * se.sqrt() + alpha * xe.sqrt();
            assert!((s[i] - expect).abs() < 1e-14);
        }
        assert!((s_sq - a.sub(&ar).unwrap().frobenius_sq()).abs() <= 1e-10 * s_sq);
        assert!((x_sq - x.sub(&xr).unwrap().frobenius_sq()).abs() <= 1e-10 * x_sq);
    }

    #[test]
    fn factored_structure_matches_dense() {
        let g = small_graph();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let z = random(&mut rng, 6, 3);
        let a = g.to_dense();
        let ar = z.matmul_t(&z).unwrap();
        let dense = a.sub(&ar).unwrap().frobenius_sq();
        let fact = structure_loss(&g, &z).unwrap();
        assert!((dense - fact).abs() <= 1e-10 * dense);
        let x = random(&mut rng, 6, 2);
        let xr = random(&mut rng, 6, 2);
        let s1 = node_scores(&a, Some(&ar), &x, &xr, 0.8).unwrap();
        let s2 = factored_node_scores(&g, &z, &x, &xr, ModelKind::Dominant, 0.8).unwrap();
        for (p, q) in s1.iter().zip(&s2) {
            assert!((p - q).abs() < 1e-10);
        }
    }

    #[test]
    fn training_loss_matches_dense_reference() {
        let g = small_graph();
        let op = normalized_adjacency(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = random(&mut rng, 6, 4);
        for kind in ModelKind::ALL {
            let params = ModelParams::init(kind, 4, 4, 8, 3, 2).unwrap();
            let lg = loss_and_gradients(&g, &op, &x, &params, 0.6).unwrap();
            let rec = model_forward(kind, &op, &x, &params).unwrap();
            let dense = reconstruction_loss(&g.to_dense(), rec.a_rec.as_ref(), &x, &rec.x_rec, 0.6).unwrap();
            assert!((lg.loss - dense).abs() <= 1e-10 * dense, "{kind}");
            assert_eq!(lg.flat_grad().len(), params.num_parameters());
        }
    }

    #[test]
    fn cached_propagation_matches_uncached() {
        let g = small_graph();
        let op = normalized_adjacency(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x = random(&mut rng, 6, 3);
        let x_prop = op.spmm(&x).unwrap();
        for kind in [ModelKind::Gcnae, ModelKind::Dominant] {
            let params = ModelParams::init(kind, 3, 3, 4, 2, 1).unwrap();
            let a = loss_and_gradients(&g, &op, &x, &params, 0.7).unwrap();
            let b = loss_and_gradients_cached(&g, &op, &x, Some(&x_prop), &params, 0.7).unwrap();
            assert_eq!(a.loss, b.loss);
            assert_eq!(a.grads, b.grads);
        }
    }
}
