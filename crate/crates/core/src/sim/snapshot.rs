//! Versioned JSON snapshots of a [`GraphState`], exact under round trip,
//! including the generator position.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::occupancy::OccupancyCaps;
use super::state::{Graph, GraphParts, GraphState, RngSeed};
use super::SimError;
use crate::params::ModelParams;

pub const SNAPSHOT_FORMAT: &str = "triadic-graph-snapshot";
pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub format: String,
    pub version: u32,
    pub params: ModelParams,
    pub seed: RngSeed,
    pub caps: OccupancyCaps,
    rng: ChaCha8Rng,
    #[serde(flatten)]
    graph: GraphParts,
}

impl Snapshot {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("snapshot serialises")
    }

    pub fn from_json(s: &str) -> Result<Self, SimError> {
        let snap: Snapshot =
            serde_json::from_str(s).map_err(|e| SimError::Snapshot(e.to_string()))?;
        if snap.format != SNAPSHOT_FORMAT || snap.version != SNAPSHOT_VERSION {
            return Err(SimError::Snapshot(format!(
                "unsupported snapshot {} v{}",
                snap.format, snap.version
            )));
        }
        Ok(snap)
    }
}

impl GraphState {
    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            format: SNAPSHOT_FORMAT.into(),
            version: SNAPSHOT_VERSION,
            params: self.graph.params().clone(),
            seed: self.seed,
            caps: self.graph.caps(),
            rng: self.rng.clone(),
            graph: self.graph.to_parts(),
        }
    }

    pub fn from_snapshot(snap: Snapshot) -> Result<Self, SimError> {
        Ok(Self {
            graph: Graph::from_parts(snap.params, snap.caps, snap.graph)?,
            rng: snap.rng,
            seed: snap.seed,
        })
    }
}
