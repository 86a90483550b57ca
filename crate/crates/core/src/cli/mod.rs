//! Command-line surface: file formats, commands, the sweep harness and OBJ
//! export.
//!
//! Exit codes: 0 ok, 2 usage or invalid input, 3 numerical failure,
//! 4 certificate fails the static checks, 5 sampled points left uncovered.

pub mod commands;
pub mod json;
pub mod obj;
pub mod sweep;

use thiserror::Error;

use crate::error::CoverError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed JSON in {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("certificate failed static checks: {}", .0.join("; "))]
    Static(Vec<String>),

    #[error("uncovered fraction {0} > 0")]
    Uncovered(f64),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Json { .. } => 2,
            CliError::Numerical(_) => 3,
            CliError::Static(_) => 4,
            CliError::Uncovered(_) => 5,
        }
    }
}

impl From<CoverError> for CliError {
    fn from(e: CoverError) -> Self {
        match e {
            CoverError::NonConvergence { .. } | CoverError::EmptyRegion => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}
