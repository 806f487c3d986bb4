//! Comparison of simulated graphs with the limit theory: distances between
//! distributions, log-log exponent fits, and a single-step kernel test.

mod fit;
mod kernel;
mod tv;

pub use fit::{
    degree_weight_ratio, fit_growth_exponent, fit_log_log, fit_power_law, series, summarize,
    ExponentFit, Summary, MIN_GROWTH_POINTS,
};
pub use kernel::{crafted_six_vertex_state, kernel_probabilities, kernel_test, CellStat, KernelReport, VertexKernel};
pub use tv::{tv_between, tv_distance, tv_distance_vectors, TvReport};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("incompatible supports: {0}")]
    Support(String),
    #[error("fit window {lo}..={hi} holds {found} points, need at least {need}")]
    Window { lo: f64, hi: f64, found: usize, need: usize },
    #[error("non-positive value {value} at x = {x} inside the fit window")]
    NonPositive { x: f64, value: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Theory(#[from] crate::theory::TheoryError),
}

pub type Result<T> = std::result::Result<T, AnalysisError>;
