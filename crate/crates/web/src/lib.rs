//! WebAssembly bindings for the static page in `www/`.
//!
//! Each exported function returns a JSON string; the page parses it and
//! draws on a canvas. The plain-Rust functions behind them are public so
//! they can be tested natively.

use serde::Serialize;
use triadic_core::analysis::tv_distance;
use triadic_core::sim::{GraphState, OccupancyCaps, RngSeed};
use triadic_core::theory::{
    degree_marginal, degree_tail_asymptote, joint_recursion, weight_dist, weight_tail_asymptote,
    DEFAULT_MARGINAL_TOLERANCE,
};
use triadic_core::{DerivedConstants, ModelParams};
use wasm_bindgen::prelude::*;

/// Largest simulation the page will run in one call.
pub const MAX_STEPS: u64 = 2_000_000;
pub const MAX_W: u32 = 2000;
pub const MAX_D: u32 = 2000;

#[derive(Debug, Clone, Serialize)]
pub struct ConstantsView {
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha: f64,
    pub beta: f64,
    pub tail_exponent: Option<f64>,
}

impl From<&DerivedConstants> for ConstantsView {
    fn from(c: &DerivedConstants) -> Self {
        Self {
            alpha1: c.alpha1,
            alpha2: c.alpha2,
            alpha: c.alpha,
            beta: c.beta,
            tail_exponent: (c.alpha > 0.0).then(|| 1.0 + 1.0 / c.alpha),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightTable {
    pub constants: ConstantsView,
    /// `x_w` for `w = 1..=w_max`.
    pub x_w: Vec<f64>,
    pub asymptote: Vec<Option<f64>>,
    /// `rows[w-1][d-2] = x_{d,w}` for the first rows, for a heat map.
    pub joint: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DegreeTable {
    pub constants: ConstantsView,
    /// `u_d` for `d = 2..=d_max`.
    pub u_d: Vec<f64>,
    pub asymptote: Vec<Option<f64>>,
    pub w_cutoff: u32,
    pub truncation_bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationSummary {
    pub n: u64,
    pub vertices: u64,
    pub edges: usize,
    pub triangles: usize,
    pub max_weight: u64,
    pub max_degree: u64,
    /// Empirical share of vertices with weight `w`, `w = 1..=64`.
    pub weight_share: Vec<f64>,
    /// Empirical share of vertices with degree `d`, `d = 2..=128`.
    pub degree_share: Vec<f64>,
    /// Vertices beyond weight 64 or degree 128.
    pub overflow_share: f64,
    pub theory_x_w: Vec<f64>,
    pub tv_w32: f64,
}

fn parse(p: &str, q: &str, r: &str) -> Result<(ModelParams, DerivedConstants), String> {
    let m = ModelParams::parse(p, q, r).map_err(|e| e.to_string())?;
    let c = m.derive();
    Ok((m, c))
}

pub fn weight_table(p: &str, q: &str, r: &str, w_max: u32, joint_rows: u32) -> Result<WeightTable, String> {
    if w_max == 0 || w_max > MAX_W {
        return Err(format!("w_max must be in 1..={MAX_W}"));
    }
    let (_, c) = parse(p, q, r)?;
    let xw = weight_dist(&c, w_max).map_err(|e| e.to_string())?;
    let asymptote = (1..=w_max)
        .map(|w| weight_tail_asymptote(&c, w as f64).ok())
        .collect();
    let rows = joint_rows.clamp(1, w_max.min(200));
    let j = joint_recursion(&c, rows).map_err(|e| e.to_string())?;
    Ok(WeightTable {
        constants: (&c).into(),
        x_w: xw.values().to_vec(),
        asymptote,
        joint: (1..=rows).map(|w| j.row(w).to_vec()).collect(),
    })
}

pub fn degree_table(p: &str, q: &str, r: &str, d_max: u32) -> Result<DegreeTable, String> {
    if !(2..=MAX_D).contains(&d_max) {
        return Err(format!("d_max must be in 2..={MAX_D}"));
    }
    let (_, c) = parse(p, q, r)?;
    let u = degree_marginal(&c, d_max, DEFAULT_MARGINAL_TOLERANCE).map_err(|e| e.to_string())?;
    Ok(DegreeTable {
        constants: (&c).into(),
        u_d: (2..=d_max).map(|d| u.get(d)).collect(),
        asymptote: (2..=d_max)
            .map(|d| degree_tail_asymptote(&c, d as f64).ok())
            .collect(),
        w_cutoff: u.w_cutoff,
        truncation_bound: u.truncation_bound,
    })
}

pub fn simulation_summary(p: &str, q: &str, r: &str, steps: u64, seed: u64) -> Result<SimulationSummary, String> {
    if steps == 0 || steps > MAX_STEPS {
        return Err(format!("steps must be in 1..={MAX_STEPS}"));
    }
    let (m, c) = parse(p, q, r)?;
    let caps = OccupancyCaps::default();
    let mut st = GraphState::init_with(m, RngSeed::new(seed), caps);
    st.run(steps, &[], &[], |_| {}).map_err(|e| e.to_string())?;
    let g = st.graph();
    let occ = g.occupancy();
    let v = occ.vertices as f64;
    let mut weight_share = vec![0.0; caps.w_max as usize];
    let mut degree_share = vec![0.0; caps.d_max as usize - 1];
    for (w, d, count) in occ.nonzero() {
        weight_share[w as usize - 1] += count as f64 / v;
        degree_share[d as usize - 2] += count as f64 / v;
    }
    let theory = joint_recursion(&c, 32).map_err(|e| e.to_string())?;
    let tv = tv_distance(&occ, &theory, 32).map_err(|e| e.to_string())?;
    Ok(SimulationSummary {
        n: g.step_count(),
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        triangles: g.triangle_count(),
        max_weight: g.max_weight(),
        max_degree: g.max_degree(),
        weight_share,
        degree_share,
        overflow_share: occ.overflow as f64 / v,
        theory_x_w: weight_dist(&c, caps.w_max).map_err(|e| e.to_string())?.values().to_vec(),
        tv_w32: tv.distance,
    })
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsValue> {
    r.map(|v| serde_json::to_string(&v).expect("tables serialize"))
        .map_err(|e| JsValue::from_str(&e))
}

/// `x_w` and its asymptote up to `w_max`, plus the first `joint_rows` rows of `x_{d,w}`.
#[wasm_bindgen(js_name = weightTable)]
pub fn weight_table_js(p: &str, q: &str, r: &str, w_max: u32, joint_rows: u32) -> Result<String, JsValue> {
    to_js(weight_table(p, q, r, w_max, joint_rows))
}

/// Degree marginal `u_d` and its asymptote up to `d_max`.
#[wasm_bindgen(js_name = degreeTable)]
pub fn degree_table_js(p: &str, q: &str, r: &str, d_max: u32) -> Result<String, JsValue> {
    to_js(degree_table(p, q, r, d_max))
}

/// Runs `steps` steps from the initial triangle and summarises the graph.
#[wasm_bindgen]
pub fn simulate(p: &str, q: &str, r: &str, steps: u32, seed: u32) -> Result<String, JsValue> {
    to_js(simulation_summary(p, q, r, steps as u64, seed as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_pa_weight_table() {
        let t = weight_table("1", "0", "1", 100, 5).unwrap();
        assert!((t.x_w[0] - 0.6).abs() < 1e-15);
        assert_eq!(t.joint.len(), 5);
        assert_eq!(t.joint[2].len(), 5);
        assert_eq!(t.constants.tail_exponent, Some(2.5));
        let a = t.asymptote[99].unwrap();
        assert!((a / t.x_w[99] - 1.0).abs() < 0.05);
    }

    #[test]
    fn degree_table_is_sub_probability() {
        let t = degree_table("0.5", "1", "1", 300).unwrap();
        let s: f64 = t.u_d.iter().sum();
        assert!(s <= 1.0 + 1e-12 && s > 0.99, "{s}");
        assert_eq!(t.u_d.len(), 299);
        assert!(t.asymptote.iter().all(Option::is_some));
    }

    #[test]
    fn simulation_summary_p_one() {
        let s = simulation_summary("1", "0", "1", 20_000, 3).unwrap();
        assert_eq!(s.vertices, 20_003);
        let total: f64 = s.weight_share.iter().sum::<f64>() + s.overflow_share;
        assert!((total - 1.0).abs() < 1e-9);
        assert!((s.weight_share[0] - 0.6).abs() < 0.02);
        assert!(s.tv_w32 < 0.05);
    }

    #[test]
    fn bad_inputs() {
        assert!(weight_table("0", "0", "1", 10, 1).is_err());
        assert!(weight_table("1", "0", "1", 0, 1).is_err());
        assert!(degree_table("1", "0", "1", 1).is_err());
        assert!(simulation_summary("1", "0", "1", MAX_STEPS + 1, 0).is_err());
        assert!(simulation_summary("1", "2", "1", 10, 0).is_err());
    }
}
