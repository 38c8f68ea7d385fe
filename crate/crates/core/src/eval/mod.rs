//! Ranking metrics, evaluation reports, and timing probes.

pub mod metrics;
pub mod report;
pub mod timing;

pub use metrics::{min_max_normalize, roc_auc, score_gap, ScoreGap};
pub use report::{EvalReport, CSV_HEADER};
pub use timing::{fit_loglog_slope, median, overhead_from_seconds, overhead_report, scaling_probe, Overhead, ScalingReport};
