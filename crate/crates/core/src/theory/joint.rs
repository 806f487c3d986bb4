use crate::params::{Constants, DerivedConstants};
use crate::scalar::Scalar;

use super::weight::tail_prefactor;
use super::{Result, TheoryError};

/// Default bound on the mass dropped when truncating the degree marginal.
pub const DEFAULT_MARGINAL_TOLERANCE: f64 = 1e-8;

const MARGINAL_MAX_ROWS: u32 = 50_000_000;

/// Triangular array `x_{d,w}`, `1 <= w <= w_max`, `2 <= d <= 2w`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution<T> {
    // rows[w-1][d-2]
    rows: Vec<Vec<T>>,
}

impl<T: Scalar> JointDistribution<T> {
    /// Wraps rows read back from storage; row `w` must hold `2w - 1`
    /// values for `d = 2..=2w`.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            if row.len() != 2 * i + 1 {
                return Err(TheoryError::InvalidArgument(format!(
                    "row w = {} has {} values, expected {}",
                    i + 1,
                    row.len(),
                    2 * i + 1
                )));
            }
        }
        Ok(Self { rows })
    }

    pub fn w_max(&self) -> u32 {
        self.rows.len() as u32
    }

    /// `x_{d,w}`; zero off the support and beyond `w_max`.
    pub fn get(&self, d: u32, w: u32) -> T {
        if w == 0 || d < 2 || d > 2 * w {
            return T::zero();
        }
        self.rows
            .get(w as usize - 1)
            .map(|row| row[d as usize - 2].clone())
            .unwrap_or_else(T::zero)
    }

    /// Row `w` as values for `d = 2..=2w`.
    pub fn row(&self, w: u32) -> &[T] {
        &self.rows[w as usize - 1]
    }

    pub fn row_sum(&self, w: u32) -> T {
        self.row(w).iter().cloned().fold(T::zero(), |a, b| a + b)
    }

    /// `(w, d, value)` over the whole support, by increasing `w` then `d`.
    pub fn iter(&self) -> impl Iterator<Item = (u32, u32, &T)> + '_ {
        self.rows.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(move |(j, v)| (i as u32 + 1, j as u32 + 2, v))
        })
    }
}

fn next_row<T: Scalar>(c: &Constants<T>, prev: &[T], w: u32, d_cap: Option<u32>) -> Vec<T> {
    let full = 2 * w - 1;
    let len = d_cap.map_or(full, |cap| full.min(cap.saturating_sub(1))) as usize;
    let a1 = c.alpha1.clone() * T::from_u32(w - 1);
    let a2 = c.alpha2.clone() * T::from_u32(w - 1);
    let den = c.alpha.clone() * T::from_u32(w) + c.beta.clone() + T::one();
    let at = |i: isize| -> T {
        if i < 0 {
            T::zero()
        } else {
            prev.get(i as usize).cloned().unwrap_or_else(T::zero)
        }
    };
    (0..len as isize)
        .map(|i| {
            let v = a1.clone() * at(i) + a2.clone() * at(i - 1) + c.beta.clone() * at(i - 2);
            v / den.clone()
        })
        .collect()
}

/// Builds `x_{d,w}` up to `w_max` with
/// `x_{2,1} = 1/(alpha+beta+1)` and
/// `x_{d,w} = [alpha1 (w-1) x_{d,w-1} + alpha2 (w-1) x_{d-1,w-1} + beta x_{d-2,w-1}] / (alpha w + beta + 1)`.
pub fn joint_recursion<T: Scalar>(c: &Constants<T>, w_max: u32) -> Result<JointDistribution<T>> {
    if w_max == 0 {
        return Err(TheoryError::InvalidArgument("w_max must be >= 1".into()));
    }
    let mut rows = Vec::with_capacity(w_max as usize);
    rows.push(vec![
        T::one() / (c.alpha.clone() + c.beta.clone() + T::one()),
    ]);
    for w in 2..=w_max {
        let row = next_row(c, rows.last().unwrap(), w, None);
        rows.push(row);
    }
    Ok(JointDistribution { rows })
}

/// Limit proportions `u_d` of vertices of degree `d`, truncated in weight.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeMarginal {
    /// `values[d]` for `d = 0..=d_max`; entries 0 and 1 are zero.
    pub values: Vec<f64>,
    /// Last weight row included in the column sums.
    pub w_cutoff: u32,
    /// Upper bound on `sum_{d <= d_max} (u_d - computed u_d)`.
    pub truncation_bound: f64,
}

impl DegreeMarginal {
    pub fn get(&self, d: u32) -> f64 {
        self.values.get(d as usize).copied().unwrap_or(0.0)
    }
}

/// Column sums `u_d = sum_w x_{d,w}` for `d <= d_max`.
///
/// Rows are generated only up to `d_max`. Writing `R_w` for the row mass
/// at `d <= d_max`, the recursion gives `R_w <= R_{w-1} x_w / x_{w-1}`, so
/// the dropped mass beyond row `W` is at most `R_W (alpha W + beta)`. Rows
/// are added until that bound drops below `tolerance`.
pub fn degree_marginal(c: &DerivedConstants, d_max: u32, tolerance: f64) -> Result<DegreeMarginal> {
    if d_max < 2 {
        return Err(TheoryError::InvalidArgument("d_max must be >= 2".into()));
    }
    if !(tolerance > 0.0) {
        return Err(TheoryError::InvalidArgument("tolerance must be positive".into()));
    }
    if c.alpha == 0.0 && c.beta == 0.0 {
        return Err(TheoryError::Degenerate);
    }
    let mut values = vec![0.0; d_max as usize + 1];
    let mut row = vec![1.0 / (c.alpha + c.beta + 1.0)];
    let mut w = 1u32;
    loop {
        for (i, v) in row.iter().enumerate() {
            values[i + 2] += v;
        }
        let mass: f64 = row.iter().sum();
        let bound = mass * (c.alpha * w as f64 + c.beta);
        if 2 * w >= d_max && bound < tolerance {
            return Ok(DegreeMarginal {
                values,
                w_cutoff: w,
                truncation_bound: bound,
            });
        }
        if w >= MARGINAL_MAX_ROWS {
            return Err(TheoryError::NoConvergence(tolerance));
        }
        w += 1;
        row = next_row(c, &row, w, Some(d_max));
    }
}

/// Power-law approximation of `u_d` for large `d`:
/// `Gamma(1+(beta+1)/alpha) / (alpha2 Gamma(1+beta/alpha)) (alpha d / alpha2)^{-(1+1/alpha)}`.
pub fn degree_tail_asymptote(c: &DerivedConstants, d: f64) -> Result<f64> {
    let pre = tail_prefactor(c)?;
    if c.alpha2 <= 0.0 {
        return Err(TheoryError::ZeroAlpha2);
    }
    Ok(pre / c.alpha2 * (c.alpha / c.alpha2 * d).powf(-(1.0 + 1.0 / c.alpha)))
}

#[cfg(test)]
mod tests {
    use num_rational::BigRational;

    use super::*;
    use crate::params::ModelParams;
    use crate::theory::weight_dist;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn small_values_pure_pa() {
        let c = ModelParams::parse("1", "0", "1").unwrap().derive_exact();
        let j = joint_recursion(&c, 3).unwrap();
        assert_eq!(j.get(2, 1), rat(3, 5));
        assert_eq!(j.get(3, 2), rat(6, 35));
        // alpha1 = beta = 0: only d = w + 1 is reachable
        assert_eq!(j.get(2, 2), rat(0, 1));
        assert_eq!(j.get(4, 2), rat(0, 1));
    }

    #[test]
    fn rows_round_trip() {
        let c = ModelParams::parse("0.5", "0.5", "0.5").unwrap().derive();
        let j = joint_recursion(&c, 5).unwrap();
        let rows: Vec<Vec<f64>> = (1..=5).map(|w| j.row(w).to_vec()).collect();
        assert_eq!(JointDistribution::from_rows(rows).unwrap(), j);
        assert!(JointDistribution::from_rows(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn zero_off_support() {
        let c = ModelParams::parse("0.5", "0.5", "0.5").unwrap().derive();
        let j = joint_recursion(&c, 5).unwrap();
        assert_eq!(j.get(1, 3), 0.0);
        assert_eq!(j.get(7, 3), 0.0);
        assert_eq!(j.get(2, 0), 0.0);
        assert_eq!(j.get(2, 6), 0.0);
        for w in 1..=5 {
            for d in 2..=2 * w {
                assert!(j.get(d, w) > 0.0, "d={d} w={w}");
            }
        }
        assert!(joint_recursion(&c, 0).is_err());
    }

    #[test]
    fn iter_matches_get() {
        let c = ModelParams::parse("0.5", "0.5", "0.5").unwrap().derive();
        let j = joint_recursion(&c, 6).unwrap();
        let mut n = 0;
        for (w, d, v) in j.iter() {
            assert_eq!(*v, j.get(d, w));
            n += 1;
        }
        assert_eq!(n, (1..=6).map(|w| 2 * w - 1).sum::<u32>());
    }

    #[test]
    fn row_sums_are_weight_marginal_exactly() {
        let c = ModelParams::parse("0.3", "0.6", "0.2").unwrap().derive_exact();
        let j = joint_recursion(&c, 20).unwrap();
        let x = weight_dist(&c, 20).unwrap();
        for w in 1..=20 {
            assert_eq!(j.row_sum(w), x.get(w));
        }
    }

    #[test]
    fn marginal_basic_properties() {
        let c = ModelParams::parse("0.5", "0.5", "0.5").unwrap().derive();
        let u = degree_marginal(&c, 60, DEFAULT_MARGINAL_TOLERANCE).unwrap();
        let total: f64 = u.values.iter().sum();
        assert!(total <= 1.0 + 1e-12);
        let x = weight_dist(&c, 1).unwrap();
        assert!(u.get(2) >= x.get(1));
        assert_eq!(u.get(0), 0.0);
        assert_eq!(u.get(1), 0.0);
        assert!(u.truncation_bound < DEFAULT_MARGINAL_TOLERANCE);
        assert!(u.w_cutoff >= 30);
        // a wider range captures more mass
        let wide = degree_marginal(&c, 400, DEFAULT_MARGINAL_TOLERANCE).unwrap();
        assert!(wide.values.iter().sum::<f64>() > total);
    }

    #[test]
    fn marginal_matches_full_joint_column_sums() {
        let c = ModelParams::parse("0.5", "1", "1").unwrap().derive();
        let u = degree_marginal(&c, 40, 1e-12).unwrap();
        let j = joint_recursion(&c, u.w_cutoff + 200).unwrap();
        for d in 2..=40 {
            let col: f64 = (1..=j.w_max()).map(|w| j.get(d, w)).sum();
            assert!((col - u.get(d)).abs() <= 1e-12, "d={d}");
        }
    }

    #[test]
    fn degree_asymptote_errors() {
        let c = ModelParams::parse("1", "1", "0").unwrap().derive();
        assert_eq!(degree_tail_asymptote(&c, 10.0), Err(TheoryError::ZeroAlpha));
        let c = ModelParams::parse("0.5", "1", "0").unwrap().derive();
        assert_eq!(degree_tail_asymptote(&c, 10.0), Err(TheoryError::ZeroAlpha2));
    }
}
