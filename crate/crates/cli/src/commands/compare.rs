use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;
use triadic_core::analysis::{fit_growth_exponent, summarize, tv_between, tv_distance};
use triadic_core::sim::{EmpiricalJoint, OccupancyCaps};
use triadic_core::theory::{joint_recursion, JointDistribution};
use triadic_core::ModelParams;

use super::simulate::{checkpoint_csv, occupancy_csv};
use super::theory::JOINT_CSV;
use crate::config::ExperimentConfig;
use crate::output::{create_dir, header_lines, write_csv, write_json, Table};
use crate::CliError;

pub const VERDICT_JSON: &str = "verdict.json";
pub const SEEDS_CSV: &str = "seeds.csv";

/// One pass/fail line of a verdict.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    /// Passes when `|value - target| <= tolerance`.
    fn near(name: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            target,
            tolerance,
            pass: (value - target).abs() <= tolerance,
            note: None,
        }
    }

    /// Passes when `value <= tolerance`.
    fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            target: 0.0,
            tolerance,
            pass: value <= tolerance,
            note: None,
        }
    }

    fn failed(name: impl Into<String>, note: String) -> Self {
        Self {
            name: name.into(),
            value: f64::NAN,
            target: f64::NAN,
            tolerance: f64::NAN,
            pass: false,
            note: Some(note),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub checks: Vec<Check>,
    pub pass: bool,
}

fn same_params(table: &Table, cfg: &ExperimentConfig) -> Result<(), CliError> {
    let h = &table.header;
    let (Some(p), Some(q), Some(r)) = (h.get("p"), h.get("q"), h.get("r")) else {
        return Err(CliError::Input(format!("{}: header lacks p, q, r", table.path.display())));
    };
    let theirs = ModelParams::parse(p, q, r).map_err(|e| CliError::Input(e.to_string()))?;
    if theirs != cfg.params {
        return Err(CliError::Input(format!(
            "{} was produced for (p, q, r) = ({p}, {q}, {r}), not ({}, {}, {})",
            table.path.display(),
            cfg.p,
            cfg.q,
            cfg.r
        )));
    }
    Ok(())
}

pub fn read_joint(path: &Path) -> Result<(Table, JointDistribution<f64>), CliError> {
    let t = Table::read(path)?;
    let (cw, cd, cv) = (t.column("w")?, t.column("d")?, t.column("value")?);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for i in 0..t.rows.len() {
        let (w, d): (usize, usize) = (t.get(i, cw)?, t.get(i, cd)?);
        let v = t.get_real(i, cv)?;
        if w == rows.len() + 1 && d == 2 {
            rows.push(Vec::with_capacity(2 * w - 1));
        }
        let current = rows.len();
        match rows.last_mut() {
            Some(row) if w == current && d == row.len() + 2 => row.push(v),
            _ => {
                return Err(CliError::Input(format!(
                    "{}: row {} out of order (w = {w}, d = {d})",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    let joint = JointDistribution::from_rows(rows).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok((t, joint))
}

struct SeedData {
    seed: u64,
    checkpoints: Table,
    occupancy: EmpiricalJoint,
}

fn read_seed(cfg: &ExperimentConfig, dir: &Path, seed: u64) -> Result<SeedData, CliError> {
    let cp = Table::read(&checkpoint_csv(dir, seed))?;
    same_params(&cp, cfg)?;
    if cp.rows.is_empty() {
        return Err(CliError::Input(format!("{}: no checkpoints", cp.path.display())));
    }
    let last = cp.rows.len() - 1;
    let n: u64 = cp.get(last, cp.column("n")?)?;
    let vertices: u64 = cp.get(last, cp.column("vertices")?)?;
    let overflow: u64 = cp.get(last, cp.column("overflow")?)?;
    let caps = OccupancyCaps {
        w_max: header_num(&cp, "w_max")?,
        d_max: header_num(&cp, "d_max")?,
    };

    let occ = Table::read(&occupancy_csv(dir, seed))?;
    let (cn, cw, cd, cc) = (occ.column("n")?, occ.column("w")?, occ.column("d")?, occ.column("count")?);
    let mut entries = Vec::new();
    for i in 0..occ.rows.len() {
        if occ.get::<u64>(i, cn)? == n {
            entries.push((occ.get(i, cd)?, occ.get(i, cw)?, occ.get(i, cc)?));
        }
    }
    let mut emp = EmpiricalJoint::from_counts(n, caps, entries);
    emp.overflow += overflow;
    emp.vertices += overflow;
    if emp.vertices != vertices {
        return Err(CliError::Input(format!(
            "{}: occupancy at n = {n} sums to {}, checkpoint says {vertices}",
            occ.path.display(),
            emp.vertices
        )));
    }
    Ok(SeedData {
        seed,
        checkpoints: cp,
        occupancy: emp,
    })
}

fn header_num<T: std::str::FromStr>(t: &Table, key: &str) -> Result<T, CliError> {
    t.header
        .get(key)
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| CliError::Input(format!("{}: header lacks {key}", t.path.display())))
}

fn column_series(t: &Table, col: &str) -> Result<Vec<(u64, f64)>, CliError> {
    let (cn, cv) = (t.column("n")?, t.column(col)?);
    let mut out = Vec::with_capacity(t.rows.len());
    for i in 0..t.rows.len() {
        let v: f64 = t.get(i, cv)?;
        // zero until the vertex is born
        if v > 0.0 {
            out.push((t.get(i, cn)?, v));
        }
    }
    Ok(out)
}

/// Files `compare` reads for the configured seeds.
pub fn required_inputs(cfg: &ExperimentConfig) -> Vec<PathBuf> {
    let sim = cfg.out.join("simulate");
    let mut v = vec![cfg.out.join("theory").join(JOINT_CSV)];
    for &s in &cfg.seeds {
        v.push(checkpoint_csv(&sim, s));
        v.push(occupancy_csv(&sim, s));
    }
    v
}

fn check_inputs(paths: &[PathBuf]) -> Result<(), CliError> {
    let missing: Vec<PathBuf> = paths.iter().filter(|p| !p.is_file()).cloned().collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(CliError::Missing(missing))
    }
}

/// Compares simulated graphs with the theory tables and writes
/// `<out>/compare/verdict.json`. With `self_check` the theory table is
/// compared with itself and with a fresh recomputation instead.
pub fn cmd_compare(cfg: &ExperimentConfig, self_check: bool) -> Result<Verdict, CliError> {
    let theory_path = cfg.out.join("theory").join(JOINT_CSV);
    let dir = cfg.out.join("compare");
    if self_check {
        check_inputs(std::slice::from_ref(&theory_path))?;
    } else {
        check_inputs(&required_inputs(cfg))?;
    }
    let (theory_table, theory) = read_joint(&theory_path)?;
    same_params(&theory_table, cfg)?;
    if theory.w_max() < cfg.tv_cap {
        return Err(CliError::Input(format!(
            "{} stops at w = {}, tv_cap is {}",
            theory_path.display(),
            theory.w_max(),
            cfg.tv_cap
        )));
    }
    create_dir(&dir)?;
    let c = cfg.params.derive();
    let mut checks = Vec::new();
    let mut per_seed = Vec::new();

    if self_check {
        let own = tv_between(&theory, &theory, cfg.tv_cap)?;
        checks.push(Check::below("tv_theory_self", own.distance, cfg.tv_tol));
        let fresh = joint_recursion(&c, theory.w_max())?;
        let re = tv_between(&theory, &fresh, cfg.tv_cap)?;
        checks.push(Check::below("tv_theory_recomputed", re.distance, cfg.tv_tol.max(1e-12)));
    } else {
        let sim_dir = cfg.out.join("simulate");
        let seeds: Vec<SeedData> = cfg
            .seeds
            .iter()
            .map(|&s| read_seed(cfg, &sim_dir, s))
            .collect::<Result<_, _>>()?;
        let x21 = theory.get(2, 1);
        let mut metrics: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        let mut fit_notes: BTreeMap<String, String> = BTreeMap::new();
        let mut series_names = vec!["max_weight".to_string()];
        if c.alpha2 > 0.0 {
            series_names.push("max_degree".into());
        }
        for l in &cfg.track {
            series_names.push(format!("w_{l}"));
            if c.alpha2 > 0.0 {
                series_names.push(format!("d_{l}"));
            }
        }
        for s in &seeds {
            let tv = tv_distance(&s.occupancy, &theory, cfg.tv_cap)?;
            let mut row = BTreeMap::new();
            row.insert("tv".to_string(), tv.distance);
            row.insert("tv_conservative".to_string(), tv.conservative());
            row.insert("x21".to_string(), s.occupancy.proportion(2, 1));
            if c.alpha > 0.0 {
                for name in &series_names {
                    let ser = column_series(&s.checkpoints, name)?;
                    let key = format!("slope_{name}");
                    match fit_growth_exponent(&ser, (cfg.fit_lo, cfg.fit_hi)) {
                        Ok(f) => {
                            row.insert(key, f.slope);
                        }
                        Err(e) => {
                            fit_notes.insert(key.clone(), format!("seed {}: {e}", s.seed));
                            row.insert(key, f64::NAN);
                        }
                    }
                }
                let t = &s.checkpoints;
                let last = t.rows.len() - 1;
                let mw: f64 = t.get(last, t.column("max_weight")?)?;
                let md: f64 = t.get(last, t.column("max_degree")?)?;
                row.insert("ratio_max".into(), md / mw);
                for l in &cfg.track {
                    let w: f64 = t.get(last, t.column(&format!("w_{l}"))?)?;
                    let d: f64 = t.get(last, t.column(&format!("d_{l}"))?)?;
                    row.insert(format!("ratio_{l}"), if w > 0.0 { d / w } else { f64::NAN });
                }
            }
            for (k, v) in &row {
                metrics.entry(k.clone()).or_default().push(*v);
            }
            per_seed.push((s.seed, s.occupancy.n, row));
        }

        let mean = |k: &str| summarize(&metrics[k]).mean;
        checks.push(Check::below(format!("tv_mean(w<={})", cfg.tv_cap), mean("tv"), cfg.tv_tol));
        checks.push(Check::near("x21_mean", mean("x21"), x21, cfg.x1_tol));
        if c.alpha > 0.0 {
            for name in &series_names {
                let key = format!("slope_{name}");
                let mut ch = Check::near(key.clone(), mean(&key), c.alpha, cfg.slope_tol);
                if let Some(n) = fit_notes.get(&key) {
                    ch = Check::failed(key.clone(), n.clone());
                }
                checks.push(ch);
            }
            let target = c.alpha2 / c.alpha;
            checks.push(Check::near("ratio_max_mean", mean("ratio_max"), target, cfg.ratio_tol));
            for l in &cfg.track {
                let key = format!("ratio_{l}");
                let m = mean(&key);
                checks.push(if m.is_nan() {
                    Check::failed(key, "vertex not born by the last checkpoint".into())
                } else {
                    Check::near(key, m, target, cfg.ratio_tol)
                });
            }
        }

        let keys: Vec<String> = metrics.keys().cloned().collect();
        let mut cols = vec!["seed".to_string(), "n".to_string()];
        cols.extend(keys.iter().cloned());
        let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
        let rows = per_seed.iter().map(|(seed, n, row)| {
            let mut line = format!("{seed},{n}");
            for k in &keys {
                line.push_str(&format!(",{}", row[k]));
            }
            line
        });
        write_csv(&dir.join(SEEDS_CSV), &header_lines(cfg, "compare"), &cols, rows)?;
    }

    let pass = checks.iter().all(|c| c.pass);
    let verdict = Verdict { checks, pass };
    let doc = json!({
        "schema": "triadic-verdict/1",
        "config": cfg.to_json(),
        "config_sha256": cfg.hash(),
        "mode": if self_check { "self-check" } else { "simulation" },
        "constants": { "alpha1": c.alpha1, "alpha2": c.alpha2, "alpha": c.alpha, "beta": c.beta },
        "seeds": per_seed.iter().map(|(s, n, row)| json!({"seed": s, "n": n, "metrics": row})).collect::<Vec<_>>(),
        "checks": verdict.checks,
        "pass": pass,
    });
    write_json(&dir.join(VERDICT_JSON), &doc)?;
    Ok(verdict)
}
