use serde_json::json;
use triadic_core::analysis::{crafted_six_vertex_state, kernel_test, KernelReport};
use triadic_core::sim::GraphState;

use crate::config::{ExperimentConfig, KernelState};
use crate::output::{create_dir, write_json};
use crate::CliError;

pub const KERNEL_JSON: &str = "kernel_report.json";

/// Fewest trials for which the normal approximation behind the z-scores
/// is trusted without a warning.
pub const MIN_TRIALS: u64 = 100_000;

/// Single-step frequency test from a frozen state; writes
/// `<out>/kernel/kernel_report.json`.
pub fn cmd_kernel_test(cfg: &ExperimentConfig) -> Result<KernelReport, CliError> {
    if cfg.trials < MIN_TRIALS {
        eprintln!(
            "warning: {} trials is below {MIN_TRIALS}; z-scores may be unreliable",
            cfg.trials
        );
    }
    let state = match cfg.kernel_state {
        KernelState::Init => GraphState::init(cfg.params.clone(), cfg.kernel_seed),
        KernelState::Crafted => crafted_six_vertex_state(cfg.params.clone(), cfg.kernel_seed),
    };
    let labels: Vec<i64> = state.graph().labels().collect();
    let report = kernel_test(state.graph(), &labels, cfg.trials, cfg.kernel_seed, cfg.z_threshold)?;
    let dir = cfg.out.join("kernel");
    create_dir(&dir)?;
    let doc = json!({
        "schema": "triadic-kernel/1",
        "config": cfg.to_json(),
        "config_sha256": cfg.hash(),
        "report": report,
    });
    write_json(&dir.join(KERNEL_JSON), &doc)?;
    Ok(report)
}
