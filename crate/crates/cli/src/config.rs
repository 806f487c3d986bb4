//! Experiment configuration: a flat `key = value` file merged with
//! command-line overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use triadic_core::sim::{default_checkpoint_ratio, geometric_checkpoints, OccupancyCaps};
use triadic_core::ModelParams;

use crate::CliError;

/// Which frozen state the kernel test starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelState {
    Init,
    Crafted,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Checkpoints {
    /// Ratio `10^(1/8)` from `start` up to `steps`.
    Geometric { start: u64 },
    Explicit(Vec<u64>),
}

/// Every setting of an experiment after defaults and overrides.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub p: String,
    pub q: String,
    pub r: String,
    pub params: ModelParams,
    pub steps: u64,
    pub seeds: Vec<u64>,
    pub checkpoints: Checkpoints,
    pub w_max: u32,
    pub d_max: u32,
    pub track: Vec<i64>,
    pub out: PathBuf,
    pub exact: bool,
    pub jobs: usize,
    pub snapshot: bool,
    pub marginal_tol: f64,
    pub trials: u64,
    pub kernel_state: KernelState,
    pub kernel_seed: u64,
    pub z_threshold: f64,
    pub tv_cap: u32,
    pub tv_tol: f64,
    pub x1_tol: f64,
    pub slope_tol: f64,
    pub ratio_tol: f64,
    pub fit_lo: u64,
    pub fit_hi: u64,
}

/// Keys accepted in config files and through `--set`.
pub const KEYS: &[&str] = &[
    "p",
    "q",
    "r",
    "steps",
    "seeds",
    "checkpoints",
    "w_max",
    "d_max",
    "track",
    "out",
    "exact",
    "jobs",
    "snapshot",
    "marginal_tol",
    "trials",
    "kernel_state",
    "kernel_seed",
    "z_threshold",
    "tv_cap",
    "tv_tol",
    "x1_tol",
    "slope_tol",
    "ratio_tol",
    "fit_lo",
    "fit_hi",
];

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn normalize_key(k: &str) -> String {
    k.trim().replace('-', "_")
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("config line {}: expected key = value", i + 1)))?;
        let k = normalize_key(k);
        if !KEYS.contains(&k.as_str()) {
            return Err(usage(format!("config line {}: unknown key '{k}'", i + 1)));
        }
        map.insert(k, v.trim().to_string());
    }
    Ok(map)
}

pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config_text(&text)
}

/// Applies `key=value` overrides on top of `map`.
pub fn apply_overrides<'a>(
    map: &mut BTreeMap<String, String>,
    overrides: impl IntoIterator<Item = (&'a str, String)>,
) -> Result<(), CliError> {
    for (k, v) in overrides {
        let k = normalize_key(k);
        if !KEYS.contains(&k.as_str()) {
            return Err(usage(format!("unknown key '{k}'")));
        }
        map.insert(k, v);
    }
    Ok(())
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.trim()
        .parse()
        .map_err(|_| usage(format!("{key}: cannot parse '{v}'")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool, CliError> {
    match v.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(usage(format!("{key}: expected true or false, got '{v}'"))),
    }
}

/// Comma-separated seeds; `a-b` expands to the inclusive range.
pub fn parse_seeds(v: &str) -> Result<Vec<u64>, CliError> {
    let mut out = Vec::new();
    for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item.split_once('-') {
            Some((a, b)) => {
                let (a, b): (u64, u64) = (parse_num("seeds", a)?, parse_num("seeds", b)?);
                if a > b {
                    return Err(usage(format!("seeds: empty range '{item}'")));
                }
                out.extend(a..=b);
            }
            None => out.push(parse_num("seeds", item)?),
        }
    }
    if out.is_empty() {
        return Err(usage("seeds: list is empty"));
    }
    let mut sorted = out.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != out.len() {
        return Err(usage("seeds: duplicates"));
    }
    Ok(out)
}

fn parse_labels(v: &str) -> Result<Vec<i64>, CliError> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            let l: i64 = parse_num("track", s)?;
            if l < -2 {
                return Err(usage(format!("track: labels start at -2, got {l}")));
            }
            Ok(l)
        })
        .collect()
}

fn parse_checkpoints(v: &str) -> Result<Checkpoints, CliError> {
    let v = v.trim();
    if v == "geometric" {
        return Ok(Checkpoints::Geometric { start: 1000 });
    }
    if let Some(start) = v.strip_prefix("geometric:") {
        return Ok(Checkpoints::Geometric {
            start: parse_num("checkpoints", start)?,
        });
    }
    let list: Vec<u64> = v
        .split(',')
        .map(|s| parse_num("checkpoints", s))
        .collect::<Result<_, _>>()?;
    Ok(Checkpoints::Explicit(list))
}

impl ExperimentConfig {
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self, CliError> {
        let get = |k: &str| map.get(k).map(String::as_str);
        let need = |k: &str| get(k).ok_or_else(|| usage(format!("missing required setting '{k}'")));
        let (p, q, r) = (need("p")?.to_string(), need("q")?.to_string(), need("r")?.to_string());
        let params = ModelParams::parse(&p, &q, &r).map_err(|e| usage(e.to_string()))?;

        let num = |k: &str, default: &str| -> Result<String, CliError> {
            Ok(get(k).unwrap_or(default).to_string())
        };
        let steps: u64 = parse_num("steps", &num("steps", "100000")?)?;
        if steps == 0 {
            return Err(usage("steps must be >= 1"));
        }
        let fit_lo = match get("fit_lo") {
            Some(v) => parse_num("fit_lo", v)?,
            None => (steps / 100).max(1),
        };
        let fit_hi = match get("fit_hi") {
            Some(v) => parse_num("fit_hi", v)?,
            None => steps,
        };
        let w_max: u32 = parse_num("w_max", &num("w_max", "64")?)?;
        let d_max: u32 = parse_num("d_max", &num("d_max", "128")?)?;
        let default_jobs = std::thread::available_parallelism().map_or(1, |n| n.get()).to_string();
        let kernel_state = match get("kernel_state").unwrap_or("crafted") {
            "init" => KernelState::Init,
            "crafted" => KernelState::Crafted,
            other => return Err(usage(format!("kernel_state: expected init or crafted, got '{other}'"))),
        };
        let cfg = Self {
            p,
            q,
            r,
            params,
            steps,
            seeds: parse_seeds(get("seeds").unwrap_or("1"))?,
            checkpoints: parse_checkpoints(get("checkpoints").unwrap_or("geometric"))?,
            w_max,
            d_max,
            track: parse_labels(get("track").unwrap_or("0"))?,
            out: PathBuf::from(get("out").unwrap_or("out")),
            exact: parse_bool("exact", get("exact").unwrap_or("false"))?,
            jobs: parse_num("jobs", &num("jobs", &default_jobs)?)?,
            snapshot: parse_bool("snapshot", get("snapshot").unwrap_or("true"))?,
            marginal_tol: parse_num("marginal_tol", &num("marginal_tol", "1e-8")?)?,
            trials: parse_num("trials", &num("trials", "1000000")?)?,
            kernel_state,
            kernel_seed: parse_num("kernel_seed", &num("kernel_seed", "1")?)?,
            z_threshold: parse_num("z_threshold", &num("z_threshold", "4")?)?,
            tv_cap: match get("tv_cap") {
                Some(v) => parse_num("tv_cap", v)?,
                None => 32.min(w_max).min(d_max / 2).max(1),
            },
            tv_tol: parse_num("tv_tol", &num("tv_tol", "0.01")?)?,
            x1_tol: parse_num("x1_tol", &num("x1_tol", "0.01")?)?,
            slope_tol: parse_num("slope_tol", &num("slope_tol", "0.05")?)?,
            ratio_tol: parse_num("ratio_tol", &num("ratio_tol", "0.1")?)?,
            fit_lo,
            fit_hi,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.w_max == 0 {
            return Err(usage("w_max must be >= 1"));
        }
        if self.d_max < 2 {
            return Err(usage("d_max must be >= 2"));
        }
        if self.jobs == 0 {
            return Err(usage("jobs must be >= 1"));
        }
        if self.tv_cap == 0 || self.tv_cap > self.w_max || 2 * self.tv_cap > self.d_max {
            return Err(usage(format!(
                "tv_cap = {} must satisfy 1 <= tv_cap <= w_max and 2 tv_cap <= d_max",
                self.tv_cap
            )));
        }
        if self.fit_lo == 0 || self.fit_lo >= self.fit_hi {
            return Err(usage("fit window must satisfy 0 < fit_lo < fit_hi"));
        }
        for (k, v) in [
            ("marginal_tol", self.marginal_tol),
            ("z_threshold", self.z_threshold),
        ] {
            if !(v > 0.0) {
                return Err(usage(format!("{k} must be positive")));
            }
        }
        for (k, v) in [
            ("tv_tol", self.tv_tol),
            ("x1_tol", self.x1_tol),
            ("slope_tol", self.slope_tol),
            ("ratio_tol", self.ratio_tol),
        ] {
            if !(v >= 0.0) {
                return Err(usage(format!("{k} must be >= 0")));
            }
        }
        if self.trials == 0 {
            return Err(usage("trials must be >= 1"));
        }
        if let Checkpoints::Explicit(list) = &self.checkpoints {
            if list.is_empty() || list[0] == 0 {
                return Err(usage("checkpoints must be positive"));
            }
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(usage("checkpoints must be strictly increasing"));
            }
            if *list.last().unwrap() > self.steps {
                return Err(usage("last checkpoint exceeds steps"));
            }
        }
        Ok(())
    }

    pub fn caps(&self) -> OccupancyCaps {
        OccupancyCaps {
            w_max: self.w_max,
            d_max: self.d_max,
        }
    }

    pub fn checkpoint_list(&self) -> Vec<u64> {
        match &self.checkpoints {
            Checkpoints::Explicit(list) => list.clone(),
            Checkpoints::Geometric { start } => {
                geometric_checkpoints((*start).min(self.steps), self.steps, default_checkpoint_ratio())
            }
        }
    }

    /// Settings that determine the outputs, in a fixed order. `out` and
    /// `jobs` are left out: they change where and how fast, not what.
    pub fn resolved(&self) -> Vec<(&'static str, String)> {
        let join = |v: &[String]| v.join(",");
        let checkpoints = match &self.checkpoints {
            Checkpoints::Geometric { start } => format!("geometric:{start}"),
            Checkpoints::Explicit(l) => join(&l.iter().map(u64::to_string).collect::<Vec<_>>()),
        };
        vec![
            ("p", self.p.clone()),
            ("q", self.q.clone()),
            ("r", self.r.clone()),
            ("steps", self.steps.to_string()),
            ("seeds", join(&self.seeds.iter().map(u64::to_string).collect::<Vec<_>>())),
            ("checkpoints", checkpoints),
            ("w_max", self.w_max.to_string()),
            ("d_max", self.d_max.to_string()),
            ("track", join(&self.track.iter().map(i64::to_string).collect::<Vec<_>>())),
            ("exact", self.exact.to_string()),
            ("snapshot", self.snapshot.to_string()),
            ("marginal_tol", self.marginal_tol.to_string()),
            ("trials", self.trials.to_string()),
            (
                "kernel_state",
                match self.kernel_state {
                    KernelState::Init => "init",
                    KernelState::Crafted => "crafted",
                }
                .to_string(),
            ),
            ("kernel_seed", self.kernel_seed.to_string()),
            ("z_threshold", self.z_threshold.to_string()),
            ("tv_cap", self.tv_cap.to_string()),
            ("tv_tol", self.tv_tol.to_string()),
            ("x1_tol", self.x1_tol.to_string()),
            ("slope_tol", self.slope_tol.to_string()),
            ("ratio_tol", self.ratio_tol.to_string()),
            ("fit_lo", self.fit_lo.to_string()),
            ("fit_hi", self.fit_hi.to_string()),
        ]
    }

    /// SHA-256 of the resolved settings, one `key=value` line each.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in self.resolved() {
            h.update(format!("{k}={v}\n").as_bytes());
        }
        hex::encode(h.finalize())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> = self
            .resolved()
            .into_iter()
            .map(|(k, v)| (k.to_string(), serde_json::Value::String(v)))
            .collect();
        serde_json::Value::Object(map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> BTreeMap<String, String> {
        parse_config_text("p = 1\nq = 0 # comment\nr = 1\n").unwrap()
    }

    #[test]
    fn defaults() {
        let c = ExperimentConfig::from_map(&base()).unwrap();
        assert_eq!(c.steps, 100_000);
        assert_eq!(c.seeds, vec![1]);
        assert_eq!(c.w_max, 64);
        assert_eq!((c.fit_lo, c.fit_hi), (1000, 100_000));
        let cps = c.checkpoint_list();
        assert_eq!(cps[0], 1000);
        assert_eq!(*cps.last().unwrap(), 100_000);
    }

    #[test]
    fn overrides_win() {
        let mut m = base();
        apply_overrides(&mut m, [("w-max", "4".to_string()), ("tv_cap", "2".into())]).unwrap();
        let c = ExperimentConfig::from_map(&m).unwrap();
        assert_eq!(c.w_max, 4);
        assert!(apply_overrides(&mut m, [("bogus", "1".to_string())]).is_err());
    }

    #[test]
    fn rejects_bad_values() {
        for (k, v) in [
            ("w_max", "0"),
            ("steps", "0"),
            ("seeds", ""),
            ("seeds", "3,3"),
            ("checkpoints", "10,5"),
            ("checkpoints", "200000"),
            ("exact", "maybe"),
            ("p", "0"),
            ("tv_cap", "70"),
        ] {
            let mut m = base();
            m.insert(k.into(), v.into());
            assert!(
                matches!(ExperimentConfig::from_map(&m), Err(CliError::Usage(_))),
                "{k}={v}"
            );
        }
        assert!(parse_config_text("p 1").is_err());
        assert!(parse_config_text("colour = red").is_err());
        let mut m = base();
        m.remove("r");
        assert!(ExperimentConfig::from_map(&m).is_err());
    }

    #[test]
    fn seed_ranges() {
        assert_eq!(parse_seeds("1-3,7").unwrap(), vec![1, 2, 3, 7]);
        assert!(parse_seeds("4-2").is_err());
    }

    #[test]
    fn hash_ignores_out_and_jobs() {
        let a = ExperimentConfig::from_map(&base()).unwrap();
        let mut m = base();
        m.insert("out".into(), "elsewhere".into());
        m.insert("jobs".into(), "7".into());
        let b = ExperimentConfig::from_map(&m).unwrap();
        assert_eq!(a.hash(), b.hash());
        m.insert("steps".into(), "10".into());
        let c = ExperimentConfig::from_map(&m).unwrap();
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn short_runs_checkpoint_at_end() {
        let mut m = base();
        m.insert("steps".into(), "10".into());
        let c = ExperimentConfig::from_map(&m).unwrap();
        assert_eq!(c.checkpoint_list(), vec![10]);
    }
}
