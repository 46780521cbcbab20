use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller passed inconsistent shapes, lengths, or labels.
    #[error("input error: {0}")]
    Input(String),

    #[error("circuit needs {requested} qubits but the simulator cap is {cap}")]
    Capacity { requested: usize, cap: usize },

    /// Training data cannot produce a classifier (e.g. a single class).
    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("load error in {path} at row {row}, column '{column}': {message}", path = path.display())]
    Load {
        path: PathBuf,
        row: usize,
        column: String,
        message: String,
    },

    #[error("unsupported dimension: {0}")]
    UnsupportedDimension(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Input(_)
            | Error::DegenerateData(_)
            | Error::Load { .. }
            | Error::Csv(_)
            | Error::UnsupportedDimension(_) => 3,
            Error::Capacity { .. } => 4,
            Error::Io(_) | Error::Json(_) => 1,
        }
    }
}
