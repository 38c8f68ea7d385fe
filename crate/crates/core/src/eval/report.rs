use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::eval::metrics::{min_max_normalize, roc_auc, score_gap};
use crate::models::ModelKind;

/// Evaluation of one trained detector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model: ModelKind,
    pub t: usize,
    pub seed: u64,
    pub roc_auc: f64,
    pub mean_anomalous: f64,
    pub mean_normal: f64,
    pub gap: f64,
    /// Gap after min-max normalizing the scores to `[0, 1]`.
    pub normalized_gap: f64,
    pub train_seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub eigen_seconds: Option<f64>,
}

impl EvalReport {
    pub fn evaluate(
        model: ModelKind,
        t: usize,
        seed: u64,
        scores: &[f64],
        labels: &[bool],
        train_seconds: f64,
        eigen_seconds: Option<f64>,
    ) -> Result<Self> {
        let auc = roc_auc(scores, labels)?;
        let g = score_gap(scores, labels)?;
        let ng = score_gap(&min_max_normalize(scores), labels)?;
        Ok(Self {
            model,
            t,
            seed,
            roc_auc: auc,
            mean_anomalous: g.mean_anomalous,
            mean_normal: g.mean_normal,
            gap: g.gap,
            normalized_gap: ng.gap,
            train_seconds,
            eigen_seconds,
        })
    }

    pub fn total_seconds(&self) -> f64 {
        self.train_seconds + self.eigen_seconds.unwrap_or(0.0)
    }

    /// `method,dataset,seed,t,auc,gap,train_s,eigen_s`
    pub fn csv_row(&self, dataset: &str) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.model,
            dataset,
            self.seed,
            self.t,
            self.roc_auc,
            self.gap,
            self.train_seconds,
            self.eigen_seconds.unwrap_or(0.0)
        )
    }
}

pub const CSV_HEADER: &str = "method,dataset,seed,t,auc,gap,train_s,eigen_s";

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_fields_and_json() {
        let r = EvalReport::evaluate(ModelKind::Dominant, 0, 3, &[2.0, 2.0, 4.0, 4.0], &[false, false, true, true], 1.5, None).unwrap();
        assert_eq!(r.roc_auc, 1.0);
        assert_eq!(r.gap, r.mean_anomalous - r.mean_normal);
        assert_eq!(r.normalized_gap, 1.0);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"t\":0"));
        assert!(!json.contains("eigen_seconds"));
        let back: EvalReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        assert_eq!(r.csv_row("sbm"), "dominant,sbm,3,0,1,2,1.5,0");
    }
}
