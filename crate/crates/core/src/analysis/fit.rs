use serde::{Deserialize, Serialize};

use super::{AnalysisError, Result};
use crate::sim::TrajectoryRecord;

/// Fewest checkpoints accepted by [`fit_growth_exponent`].
pub const MIN_GROWTH_POINTS: usize = 5;

/// Least-squares line through `(ln x, ln y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
    pub points: usize,
}

/// Fits `ln y = intercept + slope ln x` over points with `x` in `window`
/// (inclusive). Needs at least `min_points` points, all with `y > 0`.
pub fn fit_log_log(points: &[(f64, f64)], window: (f64, f64), min_points: usize) -> Result<ExponentFit> {
    let (lo, hi) = window;
    if !(lo > 0.0 && lo <= hi) {
        return Err(AnalysisError::InvalidArgument(format!(
            "window ({lo}, {hi}) must satisfy 0 < lo <= hi"
        )));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(x, y) in points.iter().filter(|(x, _)| *x >= lo && *x <= hi) {
        if !(y > 0.0) {
            return Err(AnalysisError::NonPositive { x, value: y });
        }
        xs.push(x.ln());
        ys.push(y.ln());
    }
    let need = min_points.max(2);
    if xs.len() < need {
        return Err(AnalysisError::Window {
            lo,
            hi,
            found: xs.len(),
            need,
        });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(AnalysisError::InvalidArgument("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok(ExponentFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
        window,
        points: xs.len(),
    })
}

/// Tail exponent of a distribution given as `(w or d, value)` pairs.
pub fn fit_power_law(dist: &[(f64, f64)], window: (f64, f64)) -> Result<ExponentFit> {
    fit_log_log(dist, window, 2)
}

/// Growth exponent of a checkpointed quantity such as `W[n, j]` or the
/// maximal degree.
pub fn fit_growth_exponent(trajectory: &[(u64, f64)], window: (u64, u64)) -> Result<ExponentFit> {
    let pts: Vec<(f64, f64)> = trajectory.iter().map(|&(n, v)| (n as f64, v)).collect();
    fit_log_log(&pts, (window.0 as f64, window.1 as f64), MIN_GROWTH_POINTS)
}

/// `(n, f(record))` for each checkpoint.
pub fn series(records: &[TrajectoryRecord], f: impl Fn(&TrajectoryRecord) -> f64) -> Vec<(u64, f64)> {
    records.iter().map(|r| (r.n, f(r))).collect()
}

/// `D[n, j] / W[n, j]` per checkpoint; NaN where the vertex is not yet born.
pub fn degree_weight_ratio(trajectory: &[(u64, u64)]) -> Vec<f64> {
    trajectory
        .iter()
        .map(|&(d, w)| if w == 0 { f64::NAN } else { d as f64 / w as f64 })
        .collect()
}

/// Mean, sample standard deviation and the individual values of a set of
/// replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub values: Vec<f64>,
}

pub fn summarize(values: &[f64]) -> Summary {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Summary {
        mean,
        std,
        values: values.to_vec(),
    }
}
