use std::path::PathBuf;

use nullflow::{CurveError, DomainError, JetError, KdvError, LameError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config {}: {msg}", if *line == 0 { "override or check".to_string() } else { format!("line {line}") })]
    /// `line` 0 marks an override or a whole-config check.
    Config { line: usize, msg: String },
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("invariant check failed:\n{0}")]
    Diagnostics(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Lame(#[from] LameError),
    #[error(transparent)]
    Kdv(#[from] KdvError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

impl CliError {
    /// 2 for bad input, 1 for everything that failed while computing.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) | Self::Config { .. } => 2,
            _ => 1,
        }
    }
}
