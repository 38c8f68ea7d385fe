use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("format error: {0}")]
    Format(String),

    #[error("invalid parameter `{name}`: {msg}")]
    Parameter { name: &'static str, msg: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("eigensolver did not converge after {iterations} restarts (residuals: {residuals:?})")]
    Convergence {
        iterations: usize,
        residuals: Vec<f64>,
    },

    #[error("refusing dense eigendecomposition of n={n} (limit {limit})")]
    TooLarge { n: usize, limit: usize },

    #[error("non-finite gradient in parameter `{0}`")]
    NonFiniteGradient(String),

    #[error("non-finite loss: {0}")]
    NonFiniteLoss(String),

    #[error("training diverged at epoch {epoch} (loss {loss})")]
    Divergence { epoch: usize, loss: f64 },

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("timing error: {0}")]
    Timing(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn param(name: &'static str, msg: impl Into<String>) -> Error {
    Error::Parameter {
        name,
        msg: msg.into(),
    }
}

pub(crate) fn dim(msg: impl Into<String>) -> Error {
    Error::Dimension(msg.into())
}
