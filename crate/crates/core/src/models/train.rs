use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::graph::{normalized_adjacency, AttributedGraph};
use crate::models::forward::{effective_alpha, factored_node_scores, forward_cached, loss_and_gradients_cached};
use crate::models::params::LayerKind;
use crate::models::params::{ModelKind, ModelParams};
use crate::spectral::{augment_features, top_eigenpairs, EigenConfig, EigenPairs};
use crate::tensor::{adam_step, AdamConfig, AdamState, DenseMatrix, ParamGrad};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub kind: ModelKind,
    pub alpha: f64,
    pub lr: f64,
    pub epochs: usize,
    pub hidden: usize,
    pub embed: usize,
    /// Eigenvectors appended to the features; 0 trains the vanilla model.
    pub t: usize,
    pub eigen_scale: f64,
    pub eigen_tol: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            kind: ModelKind::Dominant,
            alpha: 0.8,
            lr: 0.005,
            epochs: 100,
            hidden: 64,
            embed: 32,
            t: 0,
            eigen_scale: 1.0,
            eigen_tol: 1e-10,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(param("alpha", format!("must lie in [0, 1], got {}", self.alpha)));
        }
        if !(self.lr > 0.0) || !self.lr.is_finite() {
            return Err(param("lr", format!("must be positive, got {}", self.lr)));
        }
        if self.epochs == 0 {
            return Err(param("epochs", "must be at least 1"));
        }
        if self.hidden == 0 {
            return Err(param("hidden", "must be at least 1"));
        }
        if self.embed == 0 {
            return Err(param("embed", "must be at least 1"));
        }
        if !(self.eigen_scale > 0.0) || !self.eigen_scale.is_finite() {
            return Err(param("eigen_scale", format!("must be positive, got {}", self.eigen_scale)));
        }
        if !(self.eigen_tol > 0.0) {
            return Err(param("eigen_tol", format!("must be positive, got {}", self.eigen_tol)));
        }
        Ok(())
    }
}

/// Per-node anomaly scores of one trained model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnomalyScores {
    pub scores: Vec<f64>,
    pub alpha: f64,
    pub kind: ModelKind,
    pub train_seconds: f64,
    pub eigen_seconds: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub params: ModelParams,
    /// Loss before each epoch's update.
    pub history: Vec<f64>,
    pub scores: AnomalyScores,
    pub eigenpairs: Option<EigenPairs>,
}

/// Trains one detector, appending `config.t` adjacency eigenvectors to the
/// features first when `t > 0`.
pub fn train(dataset: &AttributedGraph, config: &TrainConfig) -> Result<TrainOutcome> {
    config.validate()?;
    let g = &dataset.graph;
    if g.n() == 0 {
        return Err(param("dataset", "graph has no nodes"));
    }
    let base_d = dataset.features.d();

    let (x_in, eigenpairs, eigen_seconds): (DenseMatrix, Option<EigenPairs>, Option<f64>) = if config.t > 0 {
        let start = Instant::now();
        let cfg = EigenConfig {
            t: config.t,
            tol: config.eigen_tol,
            seed: config.seed,
            ..EigenConfig::default()
        };
        let pairs = top_eigenpairs(g, &cfg)?;
        let aug = augment_features(&dataset.features, &pairs, config.eigen_scale)?;
        (aug.values, Some(pairs), Some(start.elapsed().as_secs_f64()))
    } else {
        (dataset.features.as_dense().clone(), None, None)
    };

    let start = Instant::now();
    let op = normalized_adjacency(g);
    let mut params = ModelParams::init(config.kind, x_in.cols(), base_d, config.hidden, config.embed, config.seed)?;
    let sizes: Vec<usize> = params.named_slices_mut().iter().map(|(_, s)| s.len()).collect();
    let mut adam = AdamState::new(
        AdamConfig {
            lr: config.lr,
            ..AdamConfig::default()
        },
        &sizes,
    );
    let x_prop = match params.encoder[0].kind {
        LayerKind::Gcn => Some(op.spmm(&x_in)?),
        LayerKind::Dense => None,
    };
    let mut history = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        let lg = loss_and_gradients_cached(g, &op, &x_in, x_prop.as_ref(), &params, config.alpha)?;
        if !lg.loss.is_finite() {
            return Err(Error::Divergence { epoch, loss: lg.loss });
        }
        history.push(lg.loss);
        let mut slices = params.named_slices_mut();
        let mut pg: Vec<ParamGrad<'_>> = slices
            .iter_mut()
            .zip(&lg.grads)
            .map(|((name, value), grad)| ParamGrad {
                name: name.as_str(),
                value,
                grad,
            })
            .collect();
        adam_step(&mut adam, &mut pg).map_err(|e| match e {
            Error::NonFiniteGradient(_) => Error::Divergence { epoch, loss: lg.loss },
            other => other,
        })?;
    }
    let fwd = forward_cached(&op, &x_in, x_prop.as_ref(), &params)?;
    let alpha = effective_alpha(config.kind, config.alpha);
    let scores = factored_node_scores(g, fwd.z(), &x_in, fwd.x_rec(), config.kind, alpha)?;
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::Divergence {
            epoch: config.epochs,
            loss: f64::NAN,
        });
    }
    let train_seconds = start.elapsed().as_secs_f64();

    Ok(TrainOutcome {
        params,
        history,
        scores: AnomalyScores {
            scores,
            alpha,
            kind: config.kind,
            train_seconds,
            eigen_seconds,
        },
        eigenpairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_synthetic, BenchmarkSpec, SbmParams};

    fn small() -> AttributedGraph {
        generate_synthetic(&SbmParams { n: 20, blocks: 2, p_in: 0.4, p_out: 0.05, d: 4, seed: 1 }).unwrap()
    }

    fn cfg(kind: ModelKind, t: usize, epochs: usize) -> TrainConfig {
        TrainConfig { kind, t, epochs, hidden: 16, embed: 8, ..TrainConfig::default() }
    }

    #[test]
    fn history_length_and_determinism() {
        let ds = small();
        let a = train(&ds, &cfg(ModelKind::Dominant, 0, 1)).unwrap();
        assert_eq!(a.history.len(), 1);
        for kind in ModelKind::ALL {
            let c = cfg(kind, 2, 5);
            let a = train(&ds, &c).unwrap();
            let b = train(&ds, &c).unwrap();
            assert_eq!(a.history, b.history);
            assert_eq!(a.scores.scores, b.scores.scores);
            assert_eq!(a.params, b.params);
            assert!(a.scores.eigen_seconds.is_some());
            assert!(a.scores.scores.iter().all(|s| s.is_finite() && *s >= 0.0));
        }
    }

    #[test]
    fn dominant_loss_decreases_on_small_sbm() {
        let ds = small();
        let out = train(&ds, &cfg(ModelKind::Dominant, 0, 200)).unwrap();
        assert!(out.history.iter().all(|l| l.is_finite()));
        assert!(out.history.last().unwrap() < out.history.first().unwrap());
    }

    #[test]
    fn non_structure_models_force_alpha_one() {
        let out = train(&small(), &TrainConfig { alpha: 0.3, ..cfg(ModelKind::Gcnae, 0, 2) }).unwrap();
        assert_eq!(out.scores.alpha, 1.0);
        assert!(out.scores.eigen_seconds.is_none());
    }

    #[test]
    fn invalid_configs() {
        let ds = small();
        for bad in [
            TrainConfig { alpha: 1.5, ..TrainConfig::default() },
            TrainConfig { epochs: 0, ..TrainConfig::default() },
            TrainConfig { eigen_scale: 0.0, ..TrainConfig::default() },
            TrainConfig { lr: -1.0, ..TrainConfig::default() },
        ] {
            assert!(train(&ds, &bad).is_err());
        }
        let err = train(&ds, &TrainConfig { alpha: 1.5, ..TrainConfig::default() }).unwrap_err();
        assert!(err.to_string().contains("alpha"));
    }

    #[test]
    fn huge_learning_rate_diverges_with_epoch() {
        let mut ds = BenchmarkSpec::standard(30, 3, 2, 4.0, 0.1, 2).build(0).unwrap();
        let big = DenseMatrix::from_fn(30, 3, |i, j| 1e150 * (1.0 + (i + j) as f64));
        ds.features = crate::graph::FeatureMatrix::new(big).unwrap();
        let err = train(&ds, &TrainConfig { lr: 1e6, ..cfg(ModelKind::Mlpae, 0, 50) }).unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }), "{err}");
    }

    #[test]
    fn appended_columns_add_their_own_reconstruction_error() {
        use crate::models::model_forward;
        use crate::spectral::concat_loss_additivity_check;

        let ds = small();
        let c = TrainConfig { eigen_scale: 2.0, ..cfg(ModelKind::Gcnae, 3, 20) };
        let out = train(&ds, &c).unwrap();
        let pairs = out.eigenpairs.as_ref().unwrap();
        let aug = augment_features(&ds.features, pairs, 2.0).unwrap().values;
        let op = normalized_adjacency(&ds.graph);
        let rec = model_forward(c.kind, &op, &aug, &out.params).unwrap().x_rec;
        let d = ds.features.d();
        let split = |m: &DenseMatrix, lo: usize, hi: usize| DenseMatrix::from_fn(m.rows(), hi - lo, |i, j| m.get(i, lo + j));
        let check = concat_loss_additivity_check(
            &split(&aug, 0, d),
            &split(&rec, 0, d),
            &split(&aug, d, d + 3),
            &split(&rec, d, d + 3),
        )
        .unwrap();
        assert!(check.relative_gap() <= 1e-12);
        let full = aug.sub(&rec).unwrap().frobenius_sq();
        assert!((full - check.lhs).abs() <= 1e-12 * full);
    }
}
