//! Flag parsing and dispatch.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{cmd_compare, cmd_kernel_test, cmd_simulate, cmd_theory};
use crate::config::{apply_overrides, read_config_file, ExperimentConfig};
use crate::{exit, CliError};

#[derive(Debug, Parser)]
#[command(name = "triadic", version, about = "Triadic preferential attachment: theory, simulation, comparison")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write limit distributions and asymptotes as CSV.
    Theory(Common),
    /// Simulate one graph per seed and write checkpoint tables.
    Simulate(Common),
    /// Compare simulations with the theory tables and write a verdict.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Compare the theory table with itself and with a recomputation.
        #[arg(long)]
        self_check: bool,
    },
    /// Check single-step frequencies from a frozen state.
    KernelTest(Common),
    /// theory, simulate, compare and kernel-test in sequence.
    All(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Flat `key = value` config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "p")]
    p: Option<String>,
    #[arg(long = "q")]
    q: Option<String>,
    #[arg(long = "r")]
    r: Option<String>,
    #[arg(long)]
    steps: Option<String>,
    /// Comma-separated seeds, `a-b` for a range.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    jobs: Option<String>,
    #[arg(long)]
    w_max: Option<String>,
    #[arg(long)]
    d_max: Option<String>,
    /// Comma-separated vertex labels to follow.
    #[arg(long, allow_hyphen_values = true)]
    track: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exact rational tables.
    #[arg(long)]
    exact: bool,
    /// `geometric`, `geometric:<start>` or a comma-separated list.
    #[arg(long)]
    checkpoints: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    /// Any other setting, as `key=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Common {
    fn resolve(&self) -> Result<ExperimentConfig, CliError> {
        let mut map = match &self.config {
            Some(path) => read_config_file(path)?,
            None => Default::default(),
        };
        let mut over: Vec<(&str, String)> = Vec::new();
        for item in &self.set {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("--set expects key=value, got '{item}'")))?;
            over.push((k, v.to_string()));
        }
        let flags = [
            ("p", &self.p),
            ("q", &self.q),
            ("r", &self.r),
            ("steps", &self.steps),
            ("seeds", &self.seeds),
            ("jobs", &self.jobs),
            ("w_max", &self.w_max),
            ("d_max", &self.d_max),
            ("track", &self.track),
            ("checkpoints", &self.checkpoints),
            ("trials", &self.trials),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                over.push((k, v.clone()));
            }
        }
        if let Some(out) = &self.out {
            over.push(("out", out.display().to_string()));
        }
        if self.exact {
            over.push(("exact", "true".into()));
        }
        apply_overrides(&mut map, over)?;
        ExperimentConfig::from_map(&map)
    }
}

fn report(cfg: &ExperimentConfig, name: &str, pass: bool) -> bool {
    println!("{name}: {} ({})", if pass { "PASS" } else { "FAIL" }, cfg.out.display());
    pass
}

fn dispatch(command: Command) -> Result<bool, CliError> {
    match command {
        Command::Theory(c) => {
            let cfg = c.resolve()?;
            cmd_theory(&cfg)?;
            println!("theory tables written to {}", cfg.out.join("theory").display());
            Ok(true)
        }
        Command::Simulate(c) => {
            let cfg = c.resolve()?;
            cmd_simulate(&cfg)?;
            println!("simulations written to {}", cfg.out.join("simulate").display());
            Ok(true)
        }
        Command::Compare { common, self_check } => {
            let cfg = common.resolve()?;
            let v = cmd_compare(&cfg, self_check)?;
            for ch in &v.checks {
                println!(
                    "  {:<28} {:>12.6} target {:>10.6} tol {:<8} {}",
                    ch.name,
                    ch.value,
                    ch.target,
                    ch.tolerance,
                    if ch.pass { "ok" } else { "FAIL" }
                );
            }
            Ok(report(&cfg, "compare", v.pass))
        }
        Command::KernelTest(c) => {
            let cfg = c.resolve()?;
            let r = cmd_kernel_test(&cfg)?;
            println!("  max |z| = {:.3} over {} trials", r.max_abs_z, r.trials);
            Ok(report(&cfg, "kernel-test", r.pass))
        }
        Command::All(c) => {
            let cfg = c.resolve()?;
            cmd_theory(&cfg)?;
            cmd_simulate(&cfg)?;
            let v = cmd_compare(&cfg, false)?;
            let k = cmd_kernel_test(&cfg)?;
            let a = report(&cfg, "compare", v.pass);
            let b = report(&cfg, "kernel-test", k.pass);
            Ok(a && b)
        }
    }
}

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::USAGE } else { exit::OK };
        }
    };
    match dispatch(cli.command) {
        Ok(true) => exit::OK,
        Ok(false) => exit::VERDICT_FAIL,
        Err(e) => {
            eprintln!("error: {e}");
            exit::USAGE
        }
    }
}
