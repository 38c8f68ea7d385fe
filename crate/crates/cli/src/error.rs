use std::path::{Path, PathBuf};

use thiserror::Error;

/// Failures of a command, each mapped to a stable exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error in `{field}`: {msg}")]
    Config { field: String, msg: String },

    #[error("{0}")]
    Divergence(String),

    #[error("{}: {msg}", path.display())]
    Io { path: PathBuf, msg: String },

    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn config(field: impl Into<String>, msg: impl Into<String>) -> Self {
        CliError::Config {
            field: field.into(),
            msg: msg.into(),
        }
    }

    pub fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            msg: err.to_string(),
        }
    }

    /// 0 success, 1 other, 2 config, 3 divergence, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Divergence(_) => 3,
            CliError::Io { .. } => 4,
            CliError::Other(_) => 1,
        }
    }
}

impl From<neigad_core::Error> for CliError {
    fn from(e: neigad_core::Error) -> Self {
        use neigad_core::Error as E;
        match e {
            E::Parameter { name, msg } => CliError::config(name, msg),
            E::Divergence { .. } | E::NonFiniteGradient(_) | E::NonFiniteLoss(_) => CliError::Divergence(e.to_string()),
            other => CliError::Other(other.to_string()),
        }
    }
}

/// Reads a file, reporting failures with the path.
pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Attaches `path` to parse and format errors raised while reading it.
pub fn in_file(path: &Path, e: neigad_core::Error) -> CliError {
    use neigad_core::Error as E;
    match e {
        E::Parse { .. } | E::Format(_) | E::Io(_) => CliError::io(path, e),
        other => other.into(),
    }
}
