mod compare;
mod kernel;
mod simulate;
mod theory;

pub use compare::{cmd_compare, read_joint, required_inputs, Check, Verdict, SEEDS_CSV, VERDICT_JSON};
pub use kernel::{cmd_kernel_test, KERNEL_JSON, MIN_TRIALS};
pub use simulate::{checkpoint_columns, checkpoint_csv, cmd_simulate, occupancy_csv, snapshot_json, RUN_JSON};
pub use theory::{cmd_theory, GAUSSIAN_CSV, JOINT_CSV, MARGINAL_CSV, THEORY_JSON, WEIGHT_CSV};
