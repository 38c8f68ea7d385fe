use std::path::{Path, PathBuf};

use neigad_core::graph::{
    generate_synthetic, inject_anomalies, load_features_csv, load_labels, read_graph, AttributedGraph, SbmParams,
};
use neigad_core::spectral::unit_rms_scale;
use neigad_core::{ModelKind, TrainConfig};
use serde::{Deserialize, Serialize};

use crate::error::{in_file, read_text, CliError};

/// Eigenvector column scale: a number, or `"unit_rms"` for `√n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScaleSpec {
    Value(f64),
    Named(String),
}

impl ScaleSpec {
    pub fn resolve(&self, n: usize) -> Result<f64, CliError> {
        match self {
            ScaleSpec::Value(v) => Ok(*v),
            ScaleSpec::Named(s) if s == "unit_rms" => Ok(unit_rms_scale(n)),
            ScaleSpec::Named(s) => Err(CliError::config(
                "eigen_scale",
                format!("expected a number or \"unit_rms\", got \"{s}\""),
            )),
        }
    }
}

/// Flat JSON configuration shared by `run` and `bench`. Relative paths are
/// resolved against the config file's directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub graph: Option<PathBuf>,
    pub features: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub synthetic_n: Option<usize>,
    pub synthetic_d: usize,
    pub blocks: usize,
    pub avg_degree: f64,
    pub in_fraction: f64,

    pub anomaly_rate: f64,
    pub cliques: Option<usize>,
    pub clique_size: usize,
    pub contextual: Option<usize>,
    pub candidates: usize,

    pub model: ModelKind,
    pub models: Option<Vec<ModelKind>>,
    pub alpha: f64,
    pub lr: f64,
    pub epochs: usize,
    pub hidden: usize,
    pub embed: usize,
    pub t: usize,
    pub eigen_scale: ScaleSpec,
    pub eigen_tol: f64,
    pub seed: u64,
    pub seeds: Option<Vec<u64>>,

    pub out_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let train = TrainConfig::default();
        Self {
            graph: None,
            features: None,
            labels: None,
            synthetic_n: None,
            synthetic_d: 32,
            blocks: 4,
            avg_degree: 10.0,
            in_fraction: 0.8,
            anomaly_rate: 0.05,
            cliques: None,
            clique_size: 5,
            contextual: None,
            candidates: 50,
            model: train.kind,
            models: None,
            alpha: train.alpha,
            lr: train.lr,
            epochs: train.epochs,
            hidden: train.hidden,
            embed: train.embed,
            t: 4,
            eigen_scale: ScaleSpec::Value(train.eigen_scale),
            eigen_tol: train.eigen_tol,
            seed: train.seed,
            seeds: None,
            out_dir: None,
        }
    }
}

impl RunConfig {
    /// Parses and validates `path`, resolving relative paths.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = read_text(path)?;
        let mut cfg = Self::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.graph, &mut cfg.features, &mut cfg.labels, &mut cfg.out_dir]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| {
            let msg = e.to_string();
            let field = msg
                .split('`')
                .nth(1)
                .filter(|_| msg.starts_with("unknown field") || msg.starts_with("invalid"))
                .unwrap_or("config")
                .to_string();
            CliError::config(field, msg)
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        match (&self.graph, self.synthetic_n) {
            (Some(_), Some(_)) => return Err(CliError::config("graph", "give either `graph` or `synthetic_n`, not both")),
            (None, None) => return Err(CliError::config("graph", "need a dataset: `graph` or `synthetic_n`")),
            (None, Some(n)) if n < 2 => return Err(CliError::config("synthetic_n", "need at least two nodes")),
            _ => {}
        }
        if self.graph.is_none() && (self.features.is_some() || self.labels.is_some()) {
            return Err(CliError::config("features", "`features` and `labels` apply to a `graph` file only"));
        }
        if self.graph.is_some() && self.features.is_none() {
            return Err(CliError::config("features", "a `graph` file needs a `features` CSV"));
        }
        if self.labels.is_some() && (self.cliques.is_some() || self.contextual.is_some()) {
            return Err(CliError::config("labels", "labels file given; injection counts must be unset"));
        }
        for (field, p) in [("graph", &self.graph), ("features", &self.features), ("labels", &self.labels)] {
            if let Some(p) = p {
                if !p.is_file() {
                    return Err(CliError::config(field, format!("no such file: {}", p.display())));
                }
            }
        }
        if self.out_dir.is_none() {
            return Err(CliError::config("out_dir", "output directory is required"));
        }
        if !(0.0..=1.0).contains(&self.anomaly_rate) {
            return Err(CliError::config("anomaly_rate", "must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.in_fraction) {
            return Err(CliError::config("in_fraction", "must lie in [0, 1]"));
        }
        if !(self.avg_degree >= 0.0) {
            return Err(CliError::config("avg_degree", "must be non-negative"));
        }
        if self.blocks == 0 {
            return Err(CliError::config("blocks", "must be at least 1"));
        }
        if matches!(&self.models, Some(m) if m.is_empty()) {
            return Err(CliError::config("models", "list at least one model"));
        }
        if matches!(&self.seeds, Some(s) if s.is_empty()) {
            return Err(CliError::config("seeds", "list at least one seed"));
        }
        if let ScaleSpec::Value(v) = self.eigen_scale {
            if !(v > 0.0) || !v.is_finite() {
                return Err(CliError::config("eigen_scale", format!("must be positive, got {v}")));
            }
        }
        self.eigen_scale.resolve(2)?;
        self.train_config(self.model, self.seed, 2)?.validate()?;
        Ok(())
    }

    pub fn out_dir(&self) -> &Path {
        self.out_dir.as_deref().expect("validated")
    }

    /// Training settings for one model and seed on an `n`-node dataset.
    pub fn train_config(&self, kind: ModelKind, seed: u64, n: usize) -> Result<TrainConfig, CliError> {
        Ok(TrainConfig {
            kind,
            alpha: self.alpha,
            lr: self.lr,
            epochs: self.epochs,
            hidden: self.hidden,
            embed: self.embed,
            t: self.t,
            eigen_scale: self.eigen_scale.resolve(n)?,
            eigen_tol: self.eigen_tol,
            seed,
        })
    }

    pub fn dataset_name(&self) -> String {
        match (&self.graph, self.synthetic_n) {
            (Some(p), _) => p.file_stem().map_or("graph".into(), |s| s.to_string_lossy().into_owned()),
            (None, Some(n)) => format!("sbm-n{n}"),
            (None, None) => "none".into(),
        }
    }

    fn injection_counts(&self, n: usize) -> (usize, usize) {
        let total = (self.anomaly_rate * n as f64).round() as usize;
        let default_cliques = (total / 2) / self.clique_size.max(1);
        let cliques = self.cliques.unwrap_or(default_cliques);
        let contextual = self
            .contextual
            .unwrap_or_else(|| total.saturating_sub(default_cliques * self.clique_size));
        (cliques, contextual)
    }

    /// The labeled dataset for `seed`. Injection and generation use their
    /// own seed-derived streams, so model settings never perturb the data.
    pub fn dataset(&self, seed: u64) -> Result<AttributedGraph, CliError> {
        let base = match (&self.graph, self.synthetic_n) {
            (Some(gp), _) => {
                let g = read_graph(gp, None).map_err(|e| in_file(gp, e))?;
                let fp = self.features.as_ref().expect("validated");
                let x = load_features_csv(&read_text(fp)?).map_err(|e| in_file(fp, e))?;
                if x.n() != g.n() {
                    return Err(CliError::io(fp, format!("{} feature rows for {} nodes", x.n(), g.n())));
                }
                let labels = match &self.labels {
                    Some(lp) => {
                        let l = load_labels(&read_text(lp)?).map_err(|e| in_file(lp, e))?;
                        if l.len() != g.n() {
                            return Err(CliError::io(lp, format!("{} labels for {} nodes", l.len(), g.n())));
                        }
                        Some(l)
                    }
                    None => None,
                };
                AttributedGraph::new(g, x, labels)?
            }
            (None, Some(n)) => generate_synthetic(&SbmParams::with_avg_degree(
                n,
                self.blocks,
                self.avg_degree,
                self.in_fraction,
                self.synthetic_d,
                seed,
            ))?,
            (None, None) => return Err(CliError::config("graph", "need a dataset")),
        };
        if base.labels.is_some() {
            return Ok(base);
        }
        let (cliques, contextual) = self.injection_counts(base.n());
        Ok(inject_anomalies(&base, cliques, self.clique_size, contextual, self.candidates, seed)?)
    }
}
