use std::path::PathBuf;

use thiserror::Error;

/// Problems in a model or chain file, located by line and column (1-based).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl FormatError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Format(#[from] FormatError),

    #[error(transparent)]
    Core(#[from] vbs_core::Error),

    #[error("{0}")]
    Usage(String),

    #[error("variables {vars} are not contained in a single tree node; use `vbs query` for sets spanning several nodes")]
    NotInOneNode { vars: String },

    /// A verification exceeded its tolerance. `report` is still printed.
    #[error("largest deviation {worst:e} exceeds tolerance {tolerance:e}")]
    Deviation {
        report: String,
        worst: f64,
        tolerance: f64,
    },
}

impl CliError {
    /// 2 for bad input, 3 for an operation the instance cannot perform, 4
    /// for a broken internal invariant.
    pub fn exit_code(&self) -> i32 {
        use vbs_core::Error as E;
        match self {
            CliError::Core(E::RemovalUnsupported { .. } | E::ScalarUnsupported { .. }) => 3,
            CliError::Core(
                E::MissingMessage { .. } | E::InvalidTree(_) | E::InstanceMismatch { .. } | E::NotHypertree { .. },
            ) => 4,
            CliError::Deviation { .. } => 4,
            _ => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
