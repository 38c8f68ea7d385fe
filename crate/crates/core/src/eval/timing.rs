//! Wall-clock overhead of augmentation and empirical scaling of the eigensolver.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::eval::report::EvalReport;
use crate::graph::{generate_synthetic, SbmParams};
use crate::spectral::{top_eigenpairs, EigenConfig};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Overhead {
    /// `(eigen + train)_augmented / train_vanilla − 1`
    pub relative: f64,
    pub vanilla_seconds: f64,
    pub augmented_seconds: f64,
}

pub fn overhead_report(vanilla: &EvalReport, augmented: &EvalReport) -> Result<Overhead> {
    overhead_from_seconds(vanilla.train_seconds, augmented.total_seconds())
}

pub fn overhead_from_seconds(vanilla_seconds: f64, augmented_seconds: f64) -> Result<Overhead> {
    if !(vanilla_seconds > 0.0) {
        return Err(Error::Timing(format!("vanilla time must be positive, got {vanilla_seconds}")));
    }
    Ok(Overhead {
        relative: augmented_seconds / vanilla_seconds - 1.0,
        vanilla_seconds,
        augmented_seconds,
    })
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(param("sizes", "need at least two (size, time) points"));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return Err(param("sizes", "log-log fit needs positive values"));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / lx.len() as f64;
    let my = ly.iter().sum::<f64>() / ly.len() as f64;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(param("sizes", "sizes must not all be equal"));
    }
    Ok(sxy / sxx)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub sizes: Vec<usize>,
    pub median_seconds: Vec<f64>,
    pub slope: f64,
}

/// Shortest median time the probe accepts as above clock noise.
pub const MIN_RESOLVABLE_SECONDS: f64 = 1e-4;

/// Times `top_eigenpairs(t)` on SBM graphs with the given expected degree
/// (`t` communities, 80% of edges inside communities) and fits the log-log
/// slope of median time against `n`.
pub fn scaling_probe(sizes: &[usize], t: usize, avg_degree: f64, seeds: &[u64]) -> Result<ScalingReport> {
    if sizes.len() < 3 {
        return Err(param("sizes", "need at least three sizes"));
    }
    if seeds.len() < 2 {
        return Err(param("seeds", "need at least two seeds per size"));
    }
    let cfg = EigenConfig::with_t(t);
    let mut medians = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let mut times = Vec::with_capacity(seeds.len());
        for &seed in seeds {
            let g = generate_synthetic(&SbmParams::with_avg_degree(n, t.max(1), avg_degree, 0.8, 1, seed))?.graph;
            let start = Instant::now();
            let pairs = top_eigenpairs(&g, &cfg)?;
            times.push(start.elapsed().as_secs_f64());
            std::hint::black_box(pairs);
        }
        let m = median(&times);
        if m < MIN_RESOLVABLE_SECONDS {
            return Err(Error::Timing(format!(
                "median eigen time {m:.2e}s at n={n} is below clock resolution; use larger sizes"
            )));
        }
        medians.push(m);
    }
    let xs: Vec<f64> = sizes.iter().map(|&n| n as f64).collect();
    let slope = fit_loglog_slope(&xs, &medians)?;
    Ok(ScalingReport {
        sizes: sizes.to_vec(),
        median_seconds: medians,
        slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ModelKind;

    fn report(train: f64, eigen: Option<f64>) -> EvalReport {
        EvalReport {
            model: ModelKind::Dominant,
            t: 0,
            seed: 0,
            roc_auc: 0.5,
            mean_anomalous: 0.0,
            mean_normal: 0.0,
            gap: 0.0,
            normalized_gap: 0.0,
            train_seconds: train,
            eigen_seconds: eigen,
        }
    }

    #[test]
    fn overhead_cases() {
        assert_eq!(overhead_report(&report(10.0, None), &report(10.0, Some(0.0))).unwrap().relative, 0.0);
        let o = overhead_report(&report(10.0, None), &report(10.0, Some(0.3))).unwrap();
        assert!((o.relative - 0.03).abs() < 1e-12);
        assert!(overhead_report(&report(0.0, None), &report(1.0, None)).is_err());
    }

    #[test]
    fn slopes_of_exact_power_laws() {
        let xs = [1000.0, 2000.0, 4000.0, 8000.0];
        let lin: Vec<f64> = xs.iter().map(|x| 3e-5 * x).collect();
        let quad: Vec<f64> = xs.iter().map(|x| 1e-9 * x * x).collect();
        assert!((fit_loglog_slope(&xs, &lin).unwrap() - 1.0).abs() < 1e-12);
        assert!((fit_loglog_slope(&xs, &quad).unwrap() - 2.0).abs() < 1e-12);
        assert!(fit_loglog_slope(&xs[..1], &lin[..1]).is_err());
        assert!(fit_loglog_slope(&[1.0, 1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn median_values() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn probe_parameter_errors() {
        assert!(scaling_probe(&[100, 200], 2, 4.0, &[1, 2]).is_err());
        assert!(scaling_probe(&[100, 200, 400], 2, 4.0, &[1]).is_err());
    }
}
