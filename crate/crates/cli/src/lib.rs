//! Config-driven commands behind the `neigad` binary.

pub mod commands;
pub mod config;
pub mod error;

pub use commands::{bench_csv, cmd_bench, cmd_eig, cmd_run, BenchRow, EigSummary, BENCH_HEADER};
pub use config::{RunConfig, ScaleSpec};
pub use error::CliError;

/// Worker count from `NEIGAD_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var("NEIGAD_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::config("NEIGAD_THREADS", format!("expected a positive integer, got `{v}`"))),
        },
        Err(_) => Ok(None),
    }
}
