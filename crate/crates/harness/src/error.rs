use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("could not parse {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("invalid experiment spec:\n  - {}", .0.join("\n  - "))]
    Invalid(Vec<String>),

    #[error("config kind `{config}` does not match requested kind `{requested}`")]
    KindMismatch { config: String, requested: String },

    #[error("record does not fit figure style {style}: {reason}")]
    ColumnMismatch { style: String, reason: String },

    #[error("record has no rows")]
    EmptyRecord,

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
