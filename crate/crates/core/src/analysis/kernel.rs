use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{AnalysisError, Result};
use crate::params::ModelParams;
use crate::sim::{Branch, Graph, GraphState};
use crate::theory::participation_probability;

/// One outcome of a single step, seen from a fixed vertex: the branch taken
/// and the resulting increments of its degree and weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelCell {
    pub branch: Branch,
    pub delta_d: u8,
    pub delta_w: u8,
    pub probability: f64,
}

fn choose2(x: f64) -> f64 {
    x * (x - 1.0) / 2.0
}

fn choose3(x: f64) -> f64 {
    x * (x - 1.0) * (x - 2.0) / 6.0
}

/// Exact one-step distribution of `(branch, delta d, delta w)` for the vertex
/// `label` of `graph`. Cells of probability zero are included.
pub fn kernel_probabilities(graph: &Graph, label: i64) -> Result<Vec<KernelCell>> {
    let w = graph.weight(label);
    if w == 0 {
        return Err(AnalysisError::InvalidArgument(format!("no vertex {label}")));
    }
    let params = graph.params();
    let (p, q, r) = (params.p_f64(), params.q_f64(), params.r_f64());
    let w = w as f64;
    let d = graph.degree(label) as f64;
    let v = graph.vertex_count() as f64;
    // total triangle weight before the step
    let t = (graph.step_count() + 1) as f64;
    let others = v - 1.0 - d;

    let pairs = choose2(v);
    let triples = choose3(v);
    let mut cells = Vec::with_capacity(11);
    let mut push = |branch, delta_d, delta_w, probability| {
        cells.push(KernelCell {
            branch,
            delta_d,
            delta_w,
            probability,
        })
    };

    let pref_edge = 2.0 * w / (3.0 * t);
    push(Branch::NewPreferential, 1, 1, p * r * pref_edge);
    push(Branch::NewPreferential, 0, 0, p * r * (1.0 - pref_edge));

    push(Branch::NewUniform, 1, 1, p * (1.0 - r) * d / pairs);
    push(Branch::NewUniform, 2, 1, p * (1.0 - r) * others / pairs);
    push(Branch::NewUniform, 0, 0, p * (1.0 - r) * (1.0 - (v - 1.0) / pairs));

    let pref_tri = w / t;
    push(Branch::OldPreferential, 0, 1, (1.0 - p) * q * pref_tri);
    push(Branch::OldPreferential, 0, 0, (1.0 - p) * q * (1.0 - pref_tri));

    let u = (1.0 - p) * (1.0 - q);
    let inside = choose2(v - 1.0) / triples;
    push(Branch::OldUniform, 0, 1, u * choose2(d) / triples);
    push(Branch::OldUniform, 1, 1, u * d * others / triples);
    push(Branch::OldUniform, 2, 1, u * choose2(others) / triples);
    push(Branch::OldUniform, 0, 0, u * (1.0 - inside));
    Ok(cells)
}

/// Observed against expected count for one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellStat {
    pub cell: String,
    pub observed: u64,
    pub expected: f64,
    /// `None` when the expected count is zero.
    pub z: Option<f64>,
}

impl CellStat {
    fn new(cell: String, observed: u64, probability: f64, trials: u64) -> Self {
        let expected = probability * trials as f64;
        let var = expected * (1.0 - probability);
        let z = (var > 0.0).then(|| (observed as f64 - expected) / var.sqrt());
        Self {
            cell,
            observed,
            expected,
            z,
        }
    }

    /// An impossible cell that was observed, or a z-score beyond the threshold.
    fn fails(&self, threshold: f64) -> bool {
        match self.z {
            Some(z) => z.abs() > threshold,
            None => self.observed as f64 != self.expected,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexKernel {
    pub label: i64,
    pub degree: u64,
    pub weight: u64,
    /// Cells after merging; merged cells appear once, joined by `+`.
    pub cells: Vec<CellStat>,
    /// Names of the cells pooled because their expected count was below 5.
    pub merged: Vec<String>,
    /// Marginal `(delta d, delta w)` cells, summed over branches.
    pub increments: Vec<CellStat>,
    pub participation: CellStat,
    pub participation_theory: f64,
    pub chi_square: f64,
    pub dof: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelReport {
    pub n: u64,
    pub vertex_count: u64,
    pub trials: u64,
    pub seed: u64,
    pub z_threshold: f64,
    pub vertices: Vec<VertexKernel>,
    pub max_abs_z: f64,
    pub pass: bool,
}

fn cell_name(c: &KernelCell) -> String {
    let b = match c.branch {
        Branch::NewPreferential => "new-pref",
        Branch::NewUniform => "new-unif",
        Branch::OldPreferential => "old-pref",
        Branch::OldUniform => "old-unif",
        Branch::Scripted => "scripted",
    };
    format!("{b}:({},{})", c.delta_d, c.delta_w)
}

const MIN_EXPECTED: f64 = 5.0;

/// Pools cells with expected count below [`MIN_EXPECTED`]. Cells of
/// probability zero stay separate so that any hit on them is reported.
fn merge_cells(cells: Vec<(String, u64, f64)>, trials: u64) -> (Vec<CellStat>, Vec<String>) {
    let n = trials as f64;
    let mut kept: Vec<(String, u64, f64)> = Vec::new();
    let mut pool: Option<(String, u64, f64)> = None;
    let mut merged = Vec::new();
    for (name, obs, prob) in cells {
        if prob > 0.0 && prob * n < MIN_EXPECTED {
            merged.push(name.clone());
            pool = Some(match pool {
                None => (name, obs, prob),
                Some((pn, po, pp)) => (format!("{pn}+{name}"), po + obs, pp + prob),
            });
        } else {
            kept.push((name, obs, prob));
        }
    }
    if let Some((pn, po, pp)) = pool {
        if pp * n >= MIN_EXPECTED {
            kept.push((pn, po, pp));
        } else if let Some(target) = kept
            .iter_mut()
            .filter(|c| c.2 > 0.0)
            .min_by(|a, b| a.2.total_cmp(&b.2))
        {
            merged.push(target.0.clone());
            target.0 = format!("{}+{pn}", target.0);
            target.1 += po;
            target.2 += pp;
        } else {
            kept.push((pn, po, pp));
        }
    }
    let stats = kept
        .into_iter()
        .map(|(name, obs, prob)| CellStat::new(name, obs, prob, trials))
        .collect();
    (stats, merged)
}

/// Draws `trials` independent next steps from the frozen `graph` and checks
/// the outcome frequencies of each vertex in `labels` against
/// [`kernel_probabilities`]. A vertex passes when no cell is beyond
/// `z_threshold` standard errors and no impossible cell was hit.
pub fn kernel_test(
    graph: &Graph,
    labels: &[i64],
    trials: u64,
    seed: u64,
    z_threshold: f64,
) -> Result<KernelReport> {
    if trials == 0 {
        return Err(AnalysisError::InvalidArgument("trials must be positive".into()));
    }
    let c = graph.params().derive();
    let mut tables = Vec::with_capacity(labels.len());
    for &label in labels {
        tables.push(kernel_probabilities(graph, label)?);
    }
    let index_of = |cells: &[KernelCell], b: Branch, dd: u8, dw: u8| {
        cells
            .iter()
            .position(|c| c.branch == b && c.delta_d == dd && c.delta_w == dw)
    };
    let mut counts: Vec<Vec<u64>> = tables.iter().map(|t| vec![0; t.len()]).collect();
    // Impossible outcomes, keyed by name.
    let mut stray: Vec<Vec<(String, u64)>> = vec![Vec::new(); labels.len()];

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let it = graph.sample_interaction(&mut rng);
        let triple = it.labels();
        for (k, &label) in labels.iter().enumerate() {
            let (dd, dw) = match triple.iter().position(|&x| x == label) {
                None => (0, 0),
                Some(pos) => {
                    let fresh = triple
                        .iter()
                        .enumerate()
                        .filter(|&(i, &o)| i != pos && !graph.has_edge(label, o))
                        .count() as u8;
                    (fresh, 1)
                }
            };
            match index_of(&tables[k], it.branch, dd, dw) {
                Some(i) => counts[k][i] += 1,
                None => {
                    let name = cell_name(&KernelCell {
                        branch: it.branch,
                        delta_d: dd,
                        delta_w: dw,
                        probability: 0.0,
                    });
                    match stray[k].iter_mut().find(|(n, _)| *n == name) {
                        Some(e) => e.1 += 1,
                        None => stray[k].push((name, 1)),
                    }
                }
            }
        }
    }

    let n_exec = graph.step_count() + 1;
    let v = graph.vertex_count();
    let mut vertices = Vec::with_capacity(labels.len());
    let mut max_abs_z = 0f64;
    for (k, &label) in labels.iter().enumerate() {
        let table = &tables[k];
        let raw: Vec<(String, u64, f64)> = table
            .iter()
            .zip(&counts[k])
            .map(|(c, &o)| (cell_name(c), o, c.probability))
            .collect();
        let (mut cells, merged) = merge_cells(raw, trials);
        for (name, obs) in &stray[k] {
            cells.push(CellStat::new(name.clone(), *obs, 0.0, trials));
        }

        let mut inc: Vec<((u8, u8), u64, f64)> = Vec::new();
        for (c, &o) in table.iter().zip(&counts[k]) {
            match inc.iter_mut().find(|e| e.0 == (c.delta_d, c.delta_w)) {
                Some(e) => {
                    e.1 += o;
                    e.2 += c.probability;
                }
                None => inc.push(((c.delta_d, c.delta_w), o, c.probability)),
            }
        }
        inc.sort_by_key(|e| e.0);
        let increments: Vec<CellStat> = inc
            .into_iter()
            .map(|((dd, dw), o, p)| CellStat::new(format!("({dd},{dw})"), o, p, trials))
            .collect();

        let part_obs: u64 = table
            .iter()
            .zip(&counts[k])
            .filter(|(c, _)| c.delta_w == 1)
            .map(|(_, &o)| o)
            .sum();
        let w = graph.weight(label);
        let part_theory = participation_probability(&c, w, n_exec, v)?;
        let participation = CellStat::new("participation".into(), part_obs, part_theory, trials);

        let (chi_square, used) = cells
            .iter()
            .filter(|s| s.expected > 0.0)
            .fold((0.0, 0usize), |(x, m), s| {
                (x + (s.observed as f64 - s.expected).powi(2) / s.expected, m + 1)
            });
        let all = cells.iter().chain(&increments).chain(std::iter::once(&participation));
        let mut pass = true;
        for s in all {
            if s.fails(z_threshold) {
                pass = false;
            }
            if let Some(z) = s.z {
                max_abs_z = max_abs_z.max(z.abs());
            }
        }
        vertices.push(VertexKernel {
            label,
            degree: graph.degree(label),
            weight: w,
            cells,
            merged,
            increments,
            participation,
            participation_theory: part_theory,
            chi_square,
            dof: used.saturating_sub(1),
            pass,
        });
    }
    let pass = vertices.iter().all(|v| v.pass);
    Ok(KernelReport {
        n: graph.step_count(),
        vertex_count: v,
        trials,
        seed,
        z_threshold,
        vertices,
        max_abs_z,
        pass,
    })
}

/// A small hand-built state with six vertices of unequal weights and
/// degrees, reached by scripted steps.
pub fn crafted_six_vertex_state(params: ModelParams, seed: u64) -> GraphState {
    let mut s = GraphState::init(params, seed);
    for t in [
        [1, -2, -1],
        [2, -1, 0],
        [3, 0, 1],
        [-2, 0, 2],
        [1, 2, 3],
        [-2, -1, 0],
        [-1, 0, 2],
    ] {
        s.apply_triple(t).expect("scripted triple is valid");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: &str, q: &str, r: &str) -> ModelParams {
        ModelParams::parse(p, q, r).unwrap()
    }

    #[test]
    fn cells_sum_to_one() {
        for (p, q, r) in [("1", "0", "1"), ("0.5", "0.5", "0.5"), ("0.3", "0.9", "0.1"), ("1", "1", "0")] {
            let s = crafted_six_vertex_state(params(p, q, r), 0);
            for l in s.graph().labels() {
                let cells = kernel_probabilities(s.graph(), l).unwrap();
                let total: f64 = cells.iter().map(|c| c.probability).sum();
                assert!((total - 1.0).abs() < 1e-12, "{total}");
                assert!(cells.iter().all(|c| c.probability >= 0.0));
            }
        }
    }

    #[test]
    fn participation_matches_cells() {
        let s = crafted_six_vertex_state(params("0.4", "0.3", "0.7"), 0);
        let g = s.graph();
        let c = g.params().derive();
        for l in g.labels() {
            let cells = kernel_probabilities(g, l).unwrap();
            let part: f64 = cells.iter().filter(|c| c.delta_w == 1).map(|c| c.probability).sum();
            let theory =
                participation_probability(&c, g.weight(l), g.step_count() + 1, g.vertex_count()).unwrap();
            assert!((part - theory).abs() < 1e-12, "{l}: {part} vs {theory}");
        }
    }

    #[test]
    fn crafted_state_shape() {
        let s = crafted_six_vertex_state(params("0.5", "0.5", "0.5"), 0);
        let g = s.graph();
        assert_eq!(g.vertex_count(), 6);
        g.check_invariants().unwrap();
        let dw: Vec<(u64, u64)> = g.labels().map(|l| (g.degree(l), g.weight(l))).collect();
        let mut distinct = dw.clone();
        distinct.sort();
        distinct.dedup();
        assert!(distinct.len() >= 4, "{dw:?}");
    }

    #[test]
    fn init_state_participation_is_two_thirds() {
        for r in ["1", "0"] {
            let g = GraphState::init(params("1", "0", r), 0);
            let rep = kernel_test(g.graph(), &[-2, -1, 0], 100_000, 7, 4.0).unwrap();
            assert!(rep.pass, "{rep:?}");
            for v in &rep.vertices {
                assert!((v.participation_theory - 2.0 / 3.0).abs() < 1e-15);
                let freq = v.participation.observed as f64 / 1e5;
                assert!((freq - 2.0 / 3.0).abs() < 3.0 * (2.0f64 / 9.0 / 1e5).sqrt() + 1e-3);
            }
        }
    }

    #[test]
    fn wrong_parameters_fail() {
        // frequencies drawn under one law, checked against another
        let a = crafted_six_vertex_state(params("0.5", "0.5", "0.5"), 0);
        let b = crafted_six_vertex_state(params("0.5", "0.5", "0.9"), 0);
        let labels: Vec<i64> = a.graph().labels().collect();
        let good = kernel_test(a.graph(), &labels, 200_000, 3, 4.0).unwrap();
        assert!(good.pass);
        let tables: Vec<_> = labels.iter().map(|&l| kernel_probabilities(b.graph(), l).unwrap()).collect();
        let mut worst = 0f64;
        for (v, t) in good.vertices.iter().zip(&tables) {
            for cell in &v.cells {
                if let Some(c) = t.iter().find(|c| cell_name(c) == cell.cell) {
                    let e = c.probability * 2e5;
                    worst = worst.max((cell.observed as f64 - e).abs() / e.max(1.0).sqrt());
                }
            }
        }
        assert!(worst > 4.0, "{worst}");
    }

    #[test]
    fn merging_low_cells() {
        let cells = vec![
            ("a".to_string(), 3, 1e-6),
            ("b".to_string(), 0, 2e-6),
            ("c".to_string(), 10, 0.5),
            ("d".to_string(), 0, 0.0),
            ("e".to_string(), 10, 0.5 - 3e-6),
        ];
        let (stats, merged) = merge_cells(cells, 1_000_000);
        // the pool is still below 5 and joins the smallest regular cell
        assert_eq!(merged, vec!["a", "b", "e"]);
        assert_eq!(stats.len(), 3);
        assert!(stats.iter().any(|s| s.cell == "e+a+b" && s.observed == 13));
        let zero = stats.iter().find(|s| s.cell == "d").unwrap();
        assert_eq!(zero.z, None);
        assert!(!zero.fails(4.0));
        let hit = CellStat::new("x".into(), 1, 0.0, 10);
        assert!(hit.fails(4.0));
    }
}
