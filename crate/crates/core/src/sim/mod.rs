//! Discrete-time simulation of the interaction graph.
//!
//! Each step either adds a vertex that interacts with two old ones (chosen
//! through a weight-proportional edge or uniformly) or lets three old
//! vertices interact (a weight-proportional triangle or a uniform triple).
//! Edge and triangle choices use [`CumulativeIndex`], so a step costs
//! `O(log n)`.

mod fenwick;
mod occupancy;
mod run;
mod snapshot;
mod state;
mod uniform;

pub use fenwick::CumulativeIndex;
pub use occupancy::{EmpiricalJoint, OccupancyCaps};
pub use run::{default_checkpoint_ratio, geometric_checkpoints, TrackedVertex, TrajectoryRecord};
pub use snapshot::{Snapshot, SNAPSHOT_FORMAT, SNAPSHOT_VERSION};
pub use state::{Branch, Graph, GraphState, Interaction, RngSeed, StepOutcome, RNG_ALGORITHM};
pub use uniform::sample_uniform_distinct;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid triple {0}")]
    InvalidTriple(String),
    #[error("invariant violated {0}")]
    Invariant(String),
    #[error("snapshot: {0}")]
    Snapshot(String),
}
