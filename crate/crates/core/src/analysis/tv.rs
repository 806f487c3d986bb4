use serde::{Deserialize, Serialize};

use super::{AnalysisError, Result};
use crate::sim::EmpiricalJoint;
use crate::theory::JointDistribution;

/// Total variation distance on the support `w <= support_cap`, with the
/// mass each side puts outside that support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TvReport {
    pub support_cap: u32,
    /// `(1/2) sum |a - b|` over the capped support.
    pub distance: f64,
    pub empirical_outside: f64,
    pub theory_outside: f64,
}

impl TvReport {
    /// Upper bound on the distance over the full support, counting all
    /// outside mass as discrepancy.
    pub fn conservative(&self) -> f64 {
        self.distance + 0.5 * (self.empirical_outside + self.theory_outside)
    }
}

pub fn tv_distance_vectors(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().max(b.len());
    let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    0.5 * (0..n).map(|i| (at(a, i) - at(b, i)).abs()).sum::<f64>()
}

fn check_theory(theory: &JointDistribution<f64>, cap: u32) -> Result<()> {
    if cap == 0 {
        return Err(AnalysisError::Support("support cap must be >= 1".into()));
    }
    if theory.w_max() < cap {
        return Err(AnalysisError::Support(format!(
            "theory table stops at w = {}, cap is {cap}",
            theory.w_max()
        )));
    }
    Ok(())
}

/// Distance between empirical proportions `X[n,d,w] / V_n` and `x_{d,w}`.
pub fn tv_distance(
    emp: &EmpiricalJoint,
    theory: &JointDistribution<f64>,
    support_cap: u32,
) -> Result<TvReport> {
    check_theory(theory, support_cap)?;
    if emp.caps.w_max < support_cap || emp.caps.d_max < 2 * support_cap {
        return Err(AnalysisError::Support(format!(
            "occupancy caps (w <= {}, d <= {}) do not cover w <= {support_cap}",
            emp.caps.w_max, emp.caps.d_max
        )));
    }
    if emp.vertices == 0 {
        return Err(AnalysisError::Support("empty empirical table".into()));
    }
    let (mut diff, mut emp_in, mut th_in) = (0.0, 0.0, 0.0);
    for w in 1..=support_cap {
        for d in 2..=2 * w {
            let e = emp.proportion(d, w);
            let x = theory.get(d, w);
            diff += (e - x).abs();
            emp_in += e;
            th_in += x;
        }
    }
    Ok(TvReport {
        support_cap,
        distance: 0.5 * diff,
        empirical_outside: (1.0 - emp_in).max(0.0),
        theory_outside: (1.0 - th_in).max(0.0),
    })
}

/// Distance between two theoretical tables over `w <= support_cap`.
pub fn tv_between(
    a: &JointDistribution<f64>,
    b: &JointDistribution<f64>,
    support_cap: u32,
) -> Result<TvReport> {
    check_theory(a, support_cap)?;
    check_theory(b, support_cap)?;
    let (mut diff, mut a_in, mut b_in) = (0.0, 0.0, 0.0);
    for w in 1..=support_cap {
        for d in 2..=2 * w {
            diff += (a.get(d, w) - b.get(d, w)).abs();
            a_in += a.get(d, w);
            b_in += b.get(d, w);
        }
    }
    Ok(TvReport {
        support_cap,
        distance: 0.5 * diff,
        empirical_outside: (1.0 - a_in).max(0.0),
        theory_outside: (1.0 - b_in).max(0.0),
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::params::ModelParams;
    use crate::sim::OccupancyCaps;
    use crate::theory::joint_recursion;

    #[test]
    fn identical_theory_is_zero() {
        let c = ModelParams::parse("0.5", "0.5", "0.5").unwrap().derive();
        let j = joint_recursion(&c, 40).unwrap();
        let r = tv_between(&j, &j, 32).unwrap();
        assert_eq!(r.distance, 0.0);
        assert_eq!(r.empirical_outside, r.theory_outside);
        assert!(tv_between(&j, &j, 41).is_err());
    }

    #[test]
    fn proportional_counts_are_close() {
        // pure PA: only d = w + 1 (and d = 2 at w = 1) is reachable
        let c = ModelParams::parse("1", "0", "1").unwrap().derive();
        let j = joint_recursion(&c, 2000).unwrap();
        let scale = 1e9;
        let entries: Vec<(u32, u32, u64)> = j
            .iter()
            .filter(|(_, _, v)| **v > 0.0)
            .map(|(w, d, v)| (d, w, (v * scale).round() as u64))
            .collect();
        let emp = EmpiricalJoint::from_counts(0, OccupancyCaps::default(), entries);
        let r = tv_distance(&emp, &j, 32).unwrap();
        assert!(r.distance < 1e-4, "{r:?}");
        assert!(r.empirical_outside > 0.0 && r.theory_outside > 0.0);
        assert!(r.conservative() >= r.distance);
    }

    #[test]
    fn mismatched_caps_rejected() {
        let c = ModelParams::parse("1", "0", "1").unwrap().derive();
        let j = joint_recursion(&c, 64).unwrap();
        let small = OccupancyCaps { w_max: 16, d_max: 32 };
        let emp = EmpiricalJoint::from_counts(0, small, [(2, 1, 3)]);
        assert!(matches!(tv_distance(&emp, &j, 32), Err(AnalysisError::Support(_))));
        let empty = EmpiricalJoint::from_counts(0, OccupancyCaps::default(), []);
        assert!(tv_distance(&empty, &j, 4).is_err());
    }

    fn prob_vec() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(0.0f64..1.0, 6).prop_map(|v| {
            let s: f64 = v.iter().sum::<f64>() + 1e-9;
            v.into_iter().map(|x| x / s).collect()
        })
    }

    proptest! {
        #[test]
        fn tv_is_a_metric(a in prob_vec(), b in prob_vec(), c in prob_vec()) {
            let ab = tv_distance_vectors(&a, &b);
            prop_assert!((ab - tv_distance_vectors(&b, &a)).abs() < 1e-15);
            prop_assert_eq!(tv_distance_vectors(&a, &a), 0.0);
            prop_assert!(ab <= tv_distance_vectors(&a, &c) + tv_distance_vectors(&c, &b) + 1e-12);
            prop_assert!(ab <= 1.0 + 1e-9);
        }
    }
}
