use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde_json::json;
use triadic_core::sim::{GraphState, RngSeed, TrajectoryRecord, RNG_ALGORITHM};

use crate::config::ExperimentConfig;
use crate::output::{create_dir, header_lines, write_csv, write_json};
use crate::CliError;

pub fn checkpoint_csv(dir: &Path, seed: u64) -> PathBuf {
    dir.join(format!("seed-{seed}.csv"))
}

pub fn occupancy_csv(dir: &Path, seed: u64) -> PathBuf {
    dir.join(format!("seed-{seed}-occupancy.csv"))
}

pub fn snapshot_json(dir: &Path, seed: u64) -> PathBuf {
    dir.join(format!("seed-{seed}-snapshot.json"))
}

pub const RUN_JSON: &str = "run.json";

pub fn checkpoint_columns(track: &[i64]) -> Vec<String> {
    let mut cols: Vec<String> = ["n", "vertices", "max_weight", "max_degree", "overflow"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for l in track {
        cols.push(format!("w_{l}"));
        cols.push(format!("d_{l}"));
    }
    cols
}

struct SeedResult {
    seed: u64,
    seconds: f64,
    final_vertices: u64,
}

fn run_seed(cfg: &ExperimentConfig, dir: &Path, seed: u64, header: &[String]) -> Result<SeedResult, CliError> {
    let started = Instant::now();
    let mut state = GraphState::init_with(cfg.params.clone(), RngSeed::new(seed), cfg.caps());
    let records: Vec<TrajectoryRecord> =
        state.run_collect(cfg.steps, &cfg.checkpoint_list(), &cfg.track)?;
    let seconds = started.elapsed().as_secs_f64();

    let cols = checkpoint_columns(&cfg.track);
    let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
    let rows = records.iter().map(|r| {
        let mut row = format!(
            "{},{},{},{},{}",
            r.n, r.vertices, r.max_weight, r.max_degree, r.occupancy.overflow
        );
        for t in &r.tracked {
            row.push_str(&format!(",{},{}", t.weight, t.degree));
        }
        row
    });
    write_csv(&checkpoint_csv(dir, seed), header, &cols, rows)?;

    let rows = records.iter().flat_map(|r| {
        r.occupancy
            .nonzero()
            .map(move |(w, d, count)| format!("{},{w},{d},{count}", r.n))
    });
    write_csv(&occupancy_csv(dir, seed), header, &["n", "w", "d", "count"], rows)?;

    if cfg.snapshot {
        let path = snapshot_json(dir, seed);
        let text = state.snapshot().to_json();
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    }
    Ok(SeedResult {
        seed,
        seconds,
        final_vertices: state.graph().vertex_count(),
    })
}

/// Runs one simulation per seed, in parallel up to `jobs`, and writes
/// checkpoint tables, occupancy tables and final snapshots under
/// `<out>/simulate`.
pub fn cmd_simulate(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let dir = cfg.out.join("simulate");
    create_dir(&dir)?;
    let header = header_lines(cfg, "simulate");
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.min(cfg.seeds.len()))
        .build()
        .map_err(|e| CliError::Input(format!("thread pool: {e}")))?;
    let started = Instant::now();
    let results: Vec<SeedResult> = pool.install(|| {
        cfg.seeds
            .par_iter()
            .map(|&s| run_seed(cfg, &dir, s, &header))
            .collect::<Result<_, _>>()
    })?;
    let meta = json!({
        "schema": "triadic-run/1",
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg.to_json(),
        "config_sha256": cfg.hash(),
        "rng": RNG_ALGORITHM,
        "jobs": cfg.jobs,
        "checkpoints": cfg.checkpoint_list(),
        "wall_seconds": started.elapsed().as_secs_f64(),
        "seeds": results.iter().map(|r| json!({
            "seed": r.seed,
            "seconds": r.seconds,
            "final_vertices": r.final_vertices,
        })).collect::<Vec<_>>(),
    });
    write_json(&dir.join(RUN_JSON), &meta)
}
