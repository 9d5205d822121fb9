use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("cannot read config {path}: {source}")]
    ConfigRead {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot parse config {path}: {message}")]
    ConfigParse { path: PathBuf, message: String },

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("override '{entry}' is malformed; expected key=value")]
    BadOverride { entry: String },

    #[error("unknown solver '{name}'; valid solvers: {valid}")]
    UnknownSolver { name: String, valid: String },

    #[error("cannot write {path}: {source}")]
    OutputWrite {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot parse {path} line {line}: {message}")]
    ImportParse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("no records to export")]
    NoRecords,

    #[error(transparent)]
    Core(#[from] jpta_core::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;
