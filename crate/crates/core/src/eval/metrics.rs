use serde::{Deserialize, Serialize};

use crate::error::{dim, Error, Result};

fn class_counts(scores: &[f64], labels: &[bool]) -> Result<(usize, usize)> {
    if scores.len() != labels.len() {
        return Err(dim(format!("{} scores for {} labels", scores.len(), labels.len())));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::UndefinedMetric("scores contain NaN".into()));
    }
    let pos = labels.iter().filter(|&&l| l).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::UndefinedMetric("labels must contain both classes".into()));
    }
    Ok((pos, neg))
}

/// Area under the ROC curve via the Mann–Whitney rank statistic, ties
/// counted as half wins.
pub fn roc_auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    let (pos, neg) = class_counts(scores, labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // Twice the positive rank sum, with tied groups sharing their mean rank;
    // kept in integers so the result is exact.
    let mut twice_rank_sum: u128 = 0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        let positives = order[start..end].iter().filter(|&&i| labels[i]).count() as u128;
        // Ranks start+1..=end average to (start + 1 + end) / 2.
        twice_rank_sum += positives * (start as u128 + 1 + end as u128);
        start = end;
    }
    let p = pos as u128;
    let twice_u = twice_rank_sum - p * (p + 1);
    Ok(twice_u as f64 / (2.0 * pos as f64 * neg as f64))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreGap {
    pub mean_anomalous: f64,
    pub mean_normal: f64,
    pub gap: f64,
}

pub fn score_gap(scores: &[f64], labels: &[bool]) -> Result<ScoreGap> {
    let (pos, neg) = class_counts(scores, labels)?;
    let (mut sa, mut sn) = (0.0, 0.0);
    for (&s, &l) in scores.iter().zip(labels) {
        if l {
            sa += s;
        } else {
            sn += s;
        }
    }
    let mean_anomalous = sa / pos as f64;
    let mean_normal = sn / neg as f64;
    Ok(ScoreGap {
        mean_anomalous,
        mean_normal,
        gap: mean_anomalous - mean_normal,
    })
}

/// Rescales to `[0, 1]`; constant input maps to all zeros.
pub fn min_max_normalize(scores: &[f64]) -> Vec<f64> {
    let lo = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    if !(span > 0.0) {
        return vec![0.0; scores.len()];
    }
    scores.iter().map(|s| (s - lo) / span).collect()
}
