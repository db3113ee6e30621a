use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown preset `{0}` (see `mskrylov presets`)")]
    UnknownPreset(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("runs are not comparable: {0}")]
    Mismatch(String),

    #[error("{size} requires --long-run")]
    LongRun { size: String },

    #[error("no records for {figure} at size {size}")]
    MissingRecord { figure: String, size: usize },

    #[error(transparent)]
    Core(#[from] mskrylov::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;
