use serde::{Deserialize, Serialize};

use super::occupancy::EmpiricalJoint;
use super::state::GraphState;
use super::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrackedVertex {
    pub label: i64,
    /// `W[n, j]`, zero before birth.
    pub weight: u64,
    /// `D[n, j]`, zero before birth.
    pub degree: u64,
}

/// State summary emitted at a checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub n: u64,
    pub vertices: u64,
    pub max_weight: u64,
    pub max_degree: u64,
    pub tracked: Vec<TrackedVertex>,
    pub occupancy: EmpiricalJoint,
}

/// Log-spaced checkpoints `start, start * ratio, ...` rounded to integers,
/// deduplicated, always ending at `end`.
pub fn geometric_checkpoints(start: u64, end: u64, ratio: f64) -> Vec<u64> {
    assert!(ratio > 1.0, "ratio must exceed 1");
    let mut out = Vec::new();
    let mut x = start.max(1) as f64;
    while x.round() < end as f64 {
        let v = x.round() as u64;
        if out.last() != Some(&v) {
            out.push(v);
        }
        x *= ratio;
    }
    out.push(end);
    out
}

/// Default checkpoint ratio: eight per decade.
pub fn default_checkpoint_ratio() -> f64 {
    10f64.powf(1.0 / 8.0)
}

impl GraphState {
    pub fn record(&self, tracked: &[i64]) -> TrajectoryRecord {
        let g = &self.graph;
        TrajectoryRecord {
            n: g.step_count(),
            vertices: g.vertex_count(),
            max_weight: g.max_weight(),
            max_degree: g.max_degree(),
            tracked: tracked
                .iter()
                .map(|&label| TrackedVertex {
                    label,
                    weight: g.weight(label),
                    degree: g.degree(label),
                })
                .collect(),
            occupancy: g.occupancy(),
        }
    }

    /// Advances `steps` steps, handing a [`TrajectoryRecord`] to `sink` at
    /// every checkpoint. Checkpoints are absolute step counts, strictly
    /// increasing, within `(n, n + steps]`. The full invariant check runs
    /// at each checkpoint.
    pub fn run<F>(
        &mut self,
        steps: u64,
        checkpoints: &[u64],
        tracked: &[i64],
        mut sink: F,
    ) -> Result<(), SimError>
    where
        F: FnMut(TrajectoryRecord),
    {
        let start = self.graph.step_count();
        let end = start + steps;
        if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SimError::InvalidArgument(
                "checkpoints must be strictly increasing".into(),
            ));
        }
        if let (Some(&first), Some(&last)) = (checkpoints.first(), checkpoints.last()) {
            if first <= start || last > end {
                return Err(SimError::InvalidArgument(format!(
                    "checkpoints must lie in ({start}, {end}]"
                )));
            }
        }
        self.graph.reserve(steps);
        let mut next = checkpoints.iter().copied().peekable();
        while self.graph.step_count() < end {
            self.step();
            if next.peek() == Some(&self.graph.step_count()) {
                next.next();
                self.graph.check_invariants()?;
                sink(self.record(tracked));
            }
        }
        Ok(())
    }

    pub fn run_collect(
        &mut self,
        steps: u64,
        checkpoints: &[u64],
        tracked: &[i64],
    ) -> Result<Vec<TrajectoryRecord>, SimError> {
        let mut out = Vec::with_capacity(checkpoints.len());
        self.run(steps, checkpoints, tracked, |r| out.push(r))?;
        Ok(out)
    }
}
