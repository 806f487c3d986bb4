use serde::{Deserialize, Serialize};

/// Resolution of the occupancy table; vertices beyond either cap are
/// counted in a single overflow bucket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccupancyCaps {
    pub w_max: u32,
    pub d_max: u32,
}

impl Default for OccupancyCaps {
    fn default() -> Self {
        Self { w_max: 64, d_max: 128 }
    }
}

/// Incrementally maintained counts `X[n, d, w]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Occupancy {
    caps: OccupancyCaps,
    counts: Vec<u64>,
    overflow: u64,
}

impl Occupancy {
    pub fn new(caps: OccupancyCaps) -> Self {
        Self {
            caps,
            counts: vec![0; (caps.w_max as usize + 1) * (caps.d_max as usize + 1)],
            overflow: 0,
        }
    }

    pub fn caps(&self) -> OccupancyCaps {
        self.caps
    }

    #[inline]
    fn slot(&mut self, d: u64, w: u64) -> &mut u64 {
        if w <= self.caps.w_max as u64 && d <= self.caps.d_max as u64 {
            &mut self.counts[w as usize * (self.caps.d_max as usize + 1) + d as usize]
        } else {
            &mut self.overflow
        }
    }

    #[inline]
    pub fn add(&mut self, d: u64, w: u64) {
        *self.slot(d, w) += 1;
    }

    #[inline]
    pub fn remove(&mut self, d: u64, w: u64) {
        *self.slot(d, w) -= 1;
    }

    pub fn snapshot(&self, n: u64, vertices: u64) -> EmpiricalJoint {
        EmpiricalJoint {
            n,
            vertices,
            caps: self.caps,
            counts: self.counts.clone(),
            overflow: self.overflow,
        }
    }
}

/// Counts of vertices by degree and weight after `n` steps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmpiricalJoint {
    pub n: u64,
    pub vertices: u64,
    pub caps: OccupancyCaps,
    counts: Vec<u64>,
    pub overflow: u64,
}

impl EmpiricalJoint {
    /// Builds a table from `(d, w, count)` triples; triples beyond the caps
    /// go to the overflow bucket.
    pub fn from_counts(
        n: u64,
        caps: OccupancyCaps,
        entries: impl IntoIterator<Item = (u32, u32, u64)>,
    ) -> Self {
        let mut occ = Occupancy::new(caps);
        let mut vertices = 0;
        for (d, w, c) in entries {
            *occ.slot(d as u64, w as u64) += c;
            vertices += c;
        }
        occ.snapshot(n, vertices)
    }

    /// `X[n, d, w]` inside the caps, zero outside.
    pub fn count(&self, d: u32, w: u32) -> u64 {
        if w > self.caps.w_max || d > self.caps.d_max {
            return 0;
        }
        self.counts[w as usize * (self.caps.d_max as usize + 1) + d as usize]
    }

    pub fn proportion(&self, d: u32, w: u32) -> f64 {
        self.count(d, w) as f64 / self.vertices as f64
    }

    /// Sum of all cells plus overflow; equals `vertices` for a consistent table.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.overflow
    }

    /// Nonzero cells as `(w, d, count)`, by increasing `w` then `d`.
    pub fn nonzero(&self) -> impl Iterator<Item = (u32, u32, u64)> + '_ {
        let stride = self.caps.d_max as usize + 1;
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, c)| **c > 0)
            .map(move |(i, c)| ((i / stride) as u32, (i % stride) as u32, *c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overflow_and_totals() {
        let caps = OccupancyCaps { w_max: 2, d_max: 4 };
        let e = EmpiricalJoint::from_counts(7, caps, [(2, 1, 3), (3, 2, 1), (5, 3, 2)]);
        assert_eq!(e.vertices, 6);
        assert_eq!(e.total(), 6);
        assert_eq!(e.overflow, 2);
        assert_eq!(e.count(2, 1), 3);
        assert_eq!(e.count(5, 3), 0);
        assert_eq!(e.nonzero().collect::<Vec<_>>(), vec![(1, 2, 3), (2, 3, 1)]);
        assert!((e.proportion(2, 1) - 0.5).abs() < 1e-15);
    }
}
