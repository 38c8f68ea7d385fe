use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use neigad_cli::{cmd_bench, cmd_eig, cmd_run, threads_from_env, CliError, RunConfig};

#[global_allocator]
static GLOBAL: mimalloc::MiMalloc = mimalloc::MiMalloc;

#[derive(Parser)]
#[command(name = "neigad", version, about = "Eigenvector-augmented graph anomaly detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Top-t adjacency eigenpairs of a graph, as CSV.
    Eig {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train and evaluate one detector.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Vanilla vs augmented comparison over models and seeds.
    Bench {
        #[arg(long)]
        config: PathBuf,
    },
}

fn execute(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = threads_from_env()? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Other(e.to_string()))?;
    }
    match cli.command {
        Command::Eig { graph, t, tol, out } => {
            let s = cmd_eig(&graph, t, tol, &out)?;
            println!("eigenvalues: {:?}", s.eigenvalues);
            println!("max residual ||Au - λu||: {:.3e}", s.max_residual);
            if !s.clustered.is_empty() {
                eprintln!("warning: pairs {:?} belong to eigenvalue clusters; their vectors span a shared subspace", s.clustered);
            }
            match s.max_neighbor_residual {
                Some(r) => println!("max neighbor-average residual: {r:.3e}"),
                None => println!("max neighbor-average residual: n/a (all eigenvalues near zero)"),
            }
        }
        Command::Run { config } => {
            let cfg = RunConfig::load(&config)?;
            let r = cmd_run(&cfg)?;
            println!(
                "{} t={} seed={}: auc {:.4}, normalized gap {:.4}, train {:.2}s{}",
                r.model,
                r.t,
                r.seed,
                r.roc_auc,
                r.normalized_gap,
                r.train_seconds,
                r.eigen_seconds.map_or(String::new(), |e| format!(", eigen {e:.3}s"))
            );
        }
        Command::Bench { config } => {
            let cfg = RunConfig::load(&config)?;
            let rows = cmd_bench(&cfg)?;
            for r in &rows {
                match &r.outcome {
                    Ok(c) => println!(
                        "{} seed {}: vanilla {:.4}, neigad {:.4}, delta {:+.4}",
                        r.model, r.seed, c.vanilla.roc_auc, c.neigad.roc_auc, c.delta_auc
                    ),
                    Err(e) => println!("{} seed {}: {e}", r.model, r.seed),
                }
            }
            println!("wrote {}", cfg.out_dir().join("bench.csv").display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
