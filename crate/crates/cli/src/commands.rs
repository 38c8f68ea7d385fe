use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use neigad_core::eval::{overhead_report, CSV_HEADER};
use neigad_core::graph::read_graph;
use neigad_core::models::{evaluate_outcome, run_comparison, train, Comparison};
use neigad_core::spectral::{neighbor_average_residual, top_eigenpairs, DEFAULT_LAMBDA_FLOOR};
use neigad_core::{EigenConfig, EvalReport, ModelKind};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{in_file, write_text, CliError};

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Summary of an `eig` invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct EigSummary {
    pub eigenvalues: Vec<f64>,
    pub max_residual: f64,
    /// Largest neighbor-average deviation over pairs with non-negligible eigenvalue.
    pub max_neighbor_residual: Option<f64>,
    /// Indices of pairs whose eigenvalue is within the cluster gap of a neighbor.
    pub clustered: Vec<usize>,
}

/// Writes the top-`t` eigenpairs of the graph at `graph` as CSV to `out`.
pub fn cmd_eig(graph: &Path, t: usize, tol: f64, out: &Path) -> Result<EigSummary, CliError> {
    let g = read_graph(graph, None).map_err(|e| in_file(graph, e))?;
    let pairs = top_eigenpairs(&g, &EigenConfig { tol, ..EigenConfig::with_t(t) })?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        ensure_dir(dir)?;
    }
    write_text(out, &pairs.to_csv())?;
    let max_neighbor_residual = neighbor_average_residual(&g, &pairs, DEFAULT_LAMBDA_FLOOR)?
        .into_iter()
        .flatten()
        .reduce(f64::max);
    Ok(EigSummary {
        clustered: (0..pairs.t()).filter(|&k| pairs.clustered[k]).collect(),
        max_residual: pairs.residuals.iter().copied().fold(0.0, f64::max),
        eigenvalues: pairs.eigenvalues,
        max_neighbor_residual,
    })
}

#[derive(Serialize)]
struct RunReport<'a> {
    dataset: String,
    nodes: usize,
    anomalies: usize,
    epochs: usize,
    final_loss: f64,
    #[serde(flatten)]
    eval: &'a EvalReport,
}

/// Trains one model end to end and writes `report.json`, `scores.csv`,
/// `params.json` and, with eigenvectors, `eigenpairs.csv`.
pub fn cmd_run(config: &RunConfig) -> Result<EvalReport, CliError> {
    let ds = config.dataset(config.seed)?;
    let labels = ds.labels.clone().expect("datasets are always labeled");
    let tc = config.train_config(config.model, config.seed, ds.n())?;
    let out = train(&ds, &tc)?;
    let report = evaluate_outcome(&out, &tc, &labels)?;

    let dir = config.out_dir();
    ensure_dir(dir)?;
    let run = RunReport {
        dataset: config.dataset_name(),
        nodes: ds.n(),
        anomalies: labels.iter().filter(|&&l| l).count(),
        epochs: out.history.len(),
        final_loss: *out.history.last().expect("at least one epoch"),
        eval: &report,
    };
    let json = serde_json::to_string_pretty(&run).map_err(|e| CliError::Other(e.to_string()))?;
    write_text(&dir.join("report.json"), &(json + "\n"))?;

    let mut scores = String::from("node_id,score,label\n");
    for (i, (s, l)) in out.scores.scores.iter().zip(&labels).enumerate() {
        writeln!(scores, "{i},{s:?},{}", u8::from(*l)).unwrap();
    }
    write_text(&dir.join("scores.csv"), &scores)?;
    write_text(&dir.join("params.json"), &out.params.to_json())?;
    if let Some(pairs) = &out.eigenpairs {
        write_text(&dir.join("eigenpairs.csv"), &pairs.to_csv())?;
    }
    Ok(report)
}

/// One (model, seed) line of a benchmark.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub model: ModelKind,
    pub seed: u64,
    pub outcome: Result<Comparison, String>,
}

pub const BENCH_HEADER: &str = "model,seed,status,vanilla_auc,neigad_auc,delta_auc,vanilla_gap,neigad_gap,delta_gap,vanilla_train_s,neigad_train_s,eigen_s,overhead";

fn bench_line(model: &str, seed: &str, status: &str, values: &[f64]) -> String {
    let mut line = format!("{model},{seed},{status}");
    for v in values {
        write!(line, ",{v}").unwrap();
    }
    line
}

fn row_values(c: &Comparison) -> Vec<f64> {
    let overhead = overhead_report(&c.vanilla, &c.neigad).map_or(f64::NAN, |o| o.relative);
    vec![
        c.vanilla.roc_auc,
        c.neigad.roc_auc,
        c.delta_auc,
        c.vanilla.normalized_gap,
        c.neigad.normalized_gap,
        c.delta_normalized_gap,
        c.vanilla.train_seconds,
        c.neigad.train_seconds,
        c.neigad.eigen_seconds.unwrap_or(0.0),
        overhead,
    ]
}

/// Renders detail rows followed by one aggregate (`seed = mean`) row per
/// model. The aggregate averages over rows with status `ok`.
pub fn bench_csv(rows: &[BenchRow], models: &[ModelKind]) -> String {
    let mut out = String::from(BENCH_HEADER);
    out.push('\n');
    for r in rows {
        let line = match &r.outcome {
            Ok(c) => bench_line(r.model.name(), &r.seed.to_string(), "ok", &row_values(c)),
            Err(msg) => {
                let status = format!("error: {}", msg.replace([',', '\n'], ";"));
                bench_line(r.model.name(), &r.seed.to_string(), &status, &[f64::NAN; 10])
            }
        };
        out.push_str(&line);
        out.push('\n');
    }
    for &m in models {
        let ok: Vec<Vec<f64>> = rows
            .iter()
            .filter(|r| r.model == m)
            .filter_map(|r| r.outcome.as_ref().ok().map(row_values))
            .collect();
        let total = rows.iter().filter(|r| r.model == m).count();
        let means: Vec<f64> = (0..10)
            .map(|k| ok.iter().map(|v| v[k]).sum::<f64>() / ok.len() as f64)
            .collect();
        let status = format!("ok {}/{}", ok.len(), total);
        out.push_str(&bench_line(m.name(), "mean", &status, &means));
        out.push('\n');
    }
    out
}

/// Vanilla vs augmented comparison for every (model, seed). Runs fan out to
/// the rayon pool; rows are written in config order. Writes `bench.csv` and
/// `results.csv`.
pub fn cmd_bench(config: &RunConfig) -> Result<Vec<BenchRow>, CliError> {
    if config.t == 0 {
        return Err(CliError::config("t", "bench compares against t = 0; set t ≥ 1"));
    }
    let models = config.models.clone().unwrap_or_else(|| ModelKind::ALL.to_vec());
    let seeds = config.seeds.clone().unwrap_or_else(|| vec![config.seed]);
    let jobs: Vec<(usize, ModelKind, u64)> = models
        .iter()
        .flat_map(|&m| seeds.iter().map(move |&s| (m, s)))
        .enumerate()
        .map(|(i, (m, s))| (i, m, s))
        .collect();

    let mut rows: Vec<(usize, BenchRow)> = jobs
        .par_iter()
        .map(|&(i, model, seed)| {
            let outcome = bench_one(config, model, seed);
            if let Err(e) = &outcome {
                if e.exit_code() == 2 || e.exit_code() == 4 {
                    return Err(e.to_string());
                }
            }
            Ok((
                i,
                BenchRow {
                    model,
                    seed,
                    outcome: outcome.map_err(|e| e.to_string()),
                },
            ))
        })
        .collect::<Result<_, String>>()
        .map_err(CliError::Other)?;
    rows.sort_by_key(|(i, _)| *i);
    let rows: Vec<BenchRow> = rows.into_iter().map(|(_, r)| r).collect();

    let dir = config.out_dir();
    ensure_dir(dir)?;
    write_text(&dir.join("bench.csv"), &bench_csv(&rows, &models))?;
    let dataset = config.dataset_name();
    let mut results = String::from(CSV_HEADER);
    results.push('\n');
    for c in rows.iter().filter_map(|r| r.outcome.as_ref().ok()) {
        for rep in [&c.vanilla, &c.neigad] {
            results.push_str(&rep.csv_row(&dataset));
            results.push('\n');
        }
    }
    write_text(&dir.join("results.csv"), &results)?;
    Ok(rows)
}

fn bench_one(config: &RunConfig, model: ModelKind, seed: u64) -> Result<Comparison, CliError> {
    let ds = config.dataset(seed)?;
    let neigad = config.train_config(model, seed, ds.n())?;
    let vanilla = neigad_core::TrainConfig { t: 0, ..neigad.clone() };
    Ok(run_comparison(&ds, &vanilla, &neigad)?)
}
