//! The `triadic` command line: theory tables, simulations, comparisons
//! and kernel tests, driven by a flat config file plus flags.

pub mod args;
pub mod commands;
pub mod config;
pub mod output;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use args::run;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("missing input files:\n{}", .0.iter().map(|p| format!("  {}", p.display())).collect::<Vec<_>>().join("\n"))]
    Missing(Vec<PathBuf>),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Theory(#[from] triadic_core::theory::TheoryError),
    #[error(transparent)]
    Analysis(#[from] triadic_core::analysis::AnalysisError),
    #[error(transparent)]
    Sim(#[from] triadic_core::sim::SimError),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const VERDICT_FAIL: i32 = 2;
}
