use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::eval::EvalReport;
use crate::graph::AttributedGraph;
use crate::models::train::{train, AnomalyScores, TrainConfig, TrainOutcome};

/// Vanilla vs augmented run on one labeled dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub vanilla: EvalReport,
    pub neigad: EvalReport,
    /// `neigad.roc_auc − vanilla.roc_auc`
    pub delta_auc: f64,
    pub delta_normalized_gap: f64,
    pub vanilla_scores: AnomalyScores,
    pub neigad_scores: AnomalyScores,
}

pub fn evaluate_outcome(out: &TrainOutcome, config: &TrainConfig, labels: &[bool]) -> Result<EvalReport> {
    EvalReport::evaluate(
        config.kind,
        config.t,
        config.seed,
        &out.scores.scores,
        labels,
        out.scores.train_seconds,
        out.scores.eigen_seconds,
    )
}

/// Trains both configurations on the same dataset and labels. The configs
/// may differ only in the eigenvector count and scale.
pub fn run_comparison(dataset: &AttributedGraph, vanilla: &TrainConfig, neigad: &TrainConfig) -> Result<Comparison> {
    let aligned = TrainConfig {
        t: vanilla.t,
        eigen_scale: vanilla.eigen_scale,
        eigen_tol: vanilla.eigen_tol,
        ..neigad.clone()
    };
    if &aligned != vanilla {
        return Err(param("config", "vanilla and augmented configs may differ only in t and eigen scale"));
    }
    let labels = dataset
        .labels
        .as_deref()
        .ok_or_else(|| Error::UndefinedMetric("dataset has no anomaly labels".into()))?;
    let vo = train(dataset, vanilla)?;
    let no = train(dataset, neigad)?;
    let v = evaluate_outcome(&vo, vanilla, labels)?;
    let a = evaluate_outcome(&no, neigad, labels)?;
    Ok(Comparison {
        delta_auc: a.roc_auc - v.roc_auc,
        delta_normalized_gap: a.normalized_gap - v.normalized_gap,
        vanilla: v,
        neigad: a,
        vanilla_scores: vo.scores,
        neigad_scores: no.scores,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::BenchmarkSpec;
    use crate::models::ModelKind;

    fn cfg(t: usize) -> TrainConfig {
        TrainConfig { kind: ModelKind::Gcnae, t, epochs: 20, hidden: 8, embed: 4, seed: 2, ..TrainConfig::default() }
    }

    #[test]
    fn delta_is_exact_difference() {
        let ds = BenchmarkSpec::standard(80, 6, 2, 6.0, 0.1, 4).build(1).unwrap();
        let c = run_comparison(&ds, &cfg(0), &cfg(3)).unwrap();
        assert_eq!(c.delta_auc, c.neigad.roc_auc - c.vanilla.roc_auc);
        assert_eq!(c.vanilla.t, 0);
        assert_eq!(c.neigad.t, 3);
    }

    #[test]
    fn identical_configs_give_zero_delta() {
        let ds = BenchmarkSpec::standard(80, 6, 2, 6.0, 0.1, 4).build(1).unwrap();
        let c = run_comparison(&ds, &cfg(2), &cfg(2)).unwrap();
        assert_eq!(c.vanilla.roc_auc, c.neigad.roc_auc);
        assert_eq!(c.delta_auc, 0.0);
        assert_eq!(c.vanilla_scores.scores, c.neigad_scores.scores);
    }

    #[test]
    fn mismatched_configs_rejected() {
        let ds = BenchmarkSpec::standard(80, 6, 2, 6.0, 0.1, 4).build(1).unwrap();
        let other = TrainConfig { lr: 0.01, ..cfg(3) };
        assert!(run_comparison(&ds, &cfg(0), &other).is_err());
        let mut unlabeled = ds.clone();
        unlabeled.labels = None;
        assert!(run_comparison(&unlabeled, &cfg(0), &cfg(3)).is_err());
    }
}
