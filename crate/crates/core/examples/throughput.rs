//! Steps per second for a few parameter sets.
//!
//! `cargo run --release -p triadic-core --example throughput [steps]`

use std::time::Instant;

use triadic_core::sim::GraphState;
use triadic_core::ModelParams;

fn main() {
    let steps: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1_000_000);
    for (p, q, r) in [("1", "0", "1"), ("1", "0", "0"), ("0.5", "0.5", "0.5"), ("0.2", "0.1", "0.5")] {
        let mut s = GraphState::init(ModelParams::parse(p, q, r).unwrap(), 1);
        let t = Instant::now();
        s.run(steps, &[steps], &[0], |_| {}).unwrap();
        let secs = t.elapsed().as_secs_f64();
        println!(
            "p={p} q={q} r={r}: {steps} steps in {secs:.2}s ({:.2e} steps/s), max weight {}",
            steps as f64 / secs,
            s.graph().max_weight()
        );
    }
}

