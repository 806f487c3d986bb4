use std::fs;
use std::path::Path;

use triadic_cli::commands::{checkpoint_csv, JOINT_CSV, KERNEL_JSON, VERDICT_JSON};
use triadic_cli::run;

fn triadic(args: &[&str]) -> i32 {
    let mut argv = vec!["triadic"];
    argv.extend_from_slice(args);
    run(argv)
}

fn out(dir: &Path) -> &str {
    dir.to_str().unwrap()
}

fn data_rows(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(str::to_string)
        .collect()
}

const PURE_PA: [&str; 6] = ["--p", "1", "--q", "0", "--r", "1"];

#[test]
fn theory_pure_pa_small() {
    let tmp = tempfile::tempdir().unwrap();
    let mut args = vec!["theory", "--w-max", "4", "--out", out(tmp.path())];
    args.extend(PURE_PA);
    assert_eq!(triadic(&args), 0);
    let joint = tmp.path().join("theory").join(JOINT_CSV);
    let rows = data_rows(&joint);
    assert_eq!(rows[0], "1,2,0.6");
    assert_eq!(rows.len(), 1 + 3 + 5 + 7);
    let text = fs::read_to_string(&joint).unwrap();
    assert!(text.contains("# p = 1\n"));
    assert!(text.contains("# config_sha256 = "));
    // no Gaussian table without alpha1 > 0
    assert!(!tmp.path().join("theory/gaussian.csv").exists());
    assert!(tmp.path().join("theory/theory.json").exists());
}

#[test]
fn theory_exact_writes_rationals() {
    let tmp = tempfile::tempdir().unwrap();
    let mut args = vec!["theory", "--w-max", "3", "--exact", "--out", out(tmp.path())];
    args.extend(PURE_PA);
    assert_eq!(triadic(&args), 0);
    let rows = data_rows(&tmp.path().join("theory").join(JOINT_CSV));
    assert_eq!(rows[0], "1,2,3/5");
    assert!(rows.contains(&"2,3,6/35".to_string()));
    assert!(rows.contains(&"2,2,0/1".to_string()));
}

#[test]
fn theory_interior_writes_all_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let args = [
        "theory", "--p", "0.5", "--q", "0.5", "--r", "0.5", "--w-max", "20", "--d-max", "40", "--out",
        out(tmp.path()),
    ];
    assert_eq!(triadic(&args), 0);
    for f in ["weight.csv", "joint.csv", "gaussian.csv", "degree_marginal.csv", "theory.json"] {
        assert!(tmp.path().join("theory").join(f).is_file(), "{f}");
    }
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("theory/theory.json")).unwrap()).unwrap();
    assert_eq!(meta["constants"]["beta"], 2.5);
    assert!(meta["degree_marginal"]["truncation_bound"].as_f64().unwrap() < 1e-8);
}

#[test]
fn usage_errors_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let mut args = vec!["theory", "--w-max", "0", "--out", out(tmp.path())];
    args.extend(PURE_PA);
    assert_eq!(triadic(&args), 1);
    assert_eq!(triadic(&["theory", "--p", "2", "--q", "0", "--r", "1"]), 1);
    assert_eq!(triadic(&["theory", "--bogus"]), 1);
    assert_eq!(triadic(&["frobnicate"]), 1);
    assert_eq!(triadic(&["--help"]), 0);
}

#[test]
fn simulate_ten_steps() {
    let tmp = tempfile::tempdir().unwrap();
    let args = [
        "simulate", "--p", "0.5", "--q", "0.5", "--r", "0.5", "--steps", "10", "--checkpoints", "10",
        "--out", out(tmp.path()),
    ];
    assert_eq!(triadic(&args), 0);
    let rows = data_rows(&checkpoint_csv(&tmp.path().join("simulate"), 1));
    assert_eq!(rows.len(), 1);
    let fields: Vec<u64> = rows[0].split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(fields[0], 10);
    assert!((3..=13).contains(&fields[1]));
    assert!(tmp.path().join("simulate/seed-1-snapshot.json").is_file());
    assert!(tmp.path().join("simulate/run.json").is_file());
}

#[test]
fn simulate_p_one_adds_a_vertex_per_step() {
    let tmp = tempfile::tempdir().unwrap();
    let mut args = vec![
        "simulate", "--steps", "5000", "--seeds", "3-4", "--checkpoints", "10,100,5000", "--out",
        out(tmp.path()),
    ];
    args.extend(PURE_PA);
    assert_eq!(triadic(&args), 0);
    for seed in [3, 4] {
        for row in data_rows(&checkpoint_csv(&tmp.path().join("simulate"), seed)) {
            let f: Vec<u64> = row.split(',').map(|s| s.parse().unwrap()).collect();
            assert_eq!(f[1], f[0] + 3);
        }
    }
}

#[test]
fn simulate_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, jobs) in [(&a, "1"), (&b, "2")] {
        let args = [
            "simulate", "--p", "0.6", "--q", "0.3", "--r", "0.8", "--steps", "20000", "--seeds", "1,2",
            "--track", "-2,0,5", "--jobs", jobs, "--out", out(dir.path()),
        ];
        assert_eq!(triadic(&args), 0);
    }
    for f in ["seed-1.csv", "seed-2.csv", "seed-1-occupancy.csv", "seed-2-snapshot.json"] {
        let x = fs::read(a.path().join("simulate").join(f)).unwrap();
        let y = fs::read(b.path().join("simulate").join(f)).unwrap();
        assert!(x == y, "{f} differs");
    }
}

#[test]
fn compare_self_check_and_missing_inputs() {
    let tmp = tempfile::tempdir().unwrap();
    let mut base = vec!["--w-max", "40", "--d-max", "80", "--out", out(tmp.path())];
    base.extend(PURE_PA);

    let mut args = vec!["compare"];
    args.extend(&base);
    assert_eq!(triadic(&args), 1, "no inputs yet");

    let mut args = vec!["theory"];
    args.extend(&base);
    assert_eq!(triadic(&args), 0);

    let mut args = vec!["compare", "--self-check", "--set", "tv_tol=0"];
    args.extend(&base);
    assert_eq!(triadic(&args), 0);
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("compare").join(VERDICT_JSON)).unwrap())
            .unwrap();
    assert_eq!(v["checks"][0]["value"], 0.0);
    assert_eq!(v["pass"], true);

    // theory present, simulations absent
    let mut args = vec!["compare"];
    args.extend(&base);
    assert_eq!(triadic(&args), 1);
}

#[test]
fn compare_short_run_and_zero_tolerance() {
    let tmp = tempfile::tempdir().unwrap();
    let mut base = vec![
        "--steps", "200000", "--seeds", "1-2", "--w-max", "40", "--d-max", "80", "--out", out(tmp.path()),
    ];
    base.extend(PURE_PA);
    for cmd in ["theory", "simulate"] {
        let mut args = vec![cmd];
        args.extend(&base);
        assert_eq!(triadic(&args), 0);
    }
    let mut args = vec!["compare", "--set", "tv_tol=0.03", "--set", "x1_tol=0.02", "--set", "slope_tol=0.15", "--set", "ratio_tol=0.25"];
    args.extend(&base);
    assert_eq!(triadic(&args), 0);
    assert!(tmp.path().join("compare/seeds.csv").is_file());

    let mut args = vec!["compare", "--set", "tv_tol=0", "--set", "x1_tol=0"];
    args.extend(&base);
    assert_eq!(triadic(&args), 2);
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("compare").join(VERDICT_JSON)).unwrap())
            .unwrap();
    assert_eq!(v["pass"], false);
    assert!(v["checks"][0]["value"].as_f64().unwrap() > 0.0);
}

#[test]
fn compare_rejects_other_parameters() {
    let tmp = tempfile::tempdir().unwrap();
    let mut args = vec!["theory", "--w-max", "8", "--out", out(tmp.path())];
    args.extend(PURE_PA);
    assert_eq!(triadic(&args), 0);
    let args = [
        "compare", "--self-check", "--p", "0.5", "--q", "0", "--r", "1", "--w-max", "8", "--out",
        out(tmp.path()),
    ];
    assert_eq!(triadic(&args), 1);
}

#[test]
fn kernel_test_init_state() {
    let tmp = tempfile::tempdir().unwrap();
    let mut args = vec![
        "kernel-test", "--set", "kernel_state=init", "--trials", "100000", "--out", out(tmp.path()),
    ];
    args.extend(PURE_PA);
    assert_eq!(triadic(&args), 0);
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("kernel").join(KERNEL_JSON)).unwrap())
            .unwrap();
    assert_eq!(v["report"]["pass"], true);
    assert_eq!(v["report"]["vertices"].as_array().unwrap().len(), 3);
}

#[test]
fn config_file_with_flag_override() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("exp.cfg");
    fs::write(&cfg, "# pure preferential attachment\np = 1\nq = 0\nr = 1\nw_max = 3\n").unwrap();
    let args = ["theory", "--config", cfg.to_str().unwrap(), "--w-max", "5", "--out", out(tmp.path())];
    assert_eq!(triadic(&args), 0);
    let rows = data_rows(&tmp.path().join("theory").join(JOINT_CSV));
    assert_eq!(rows.len(), 25);
    fs::write(&cfg, "p = 1\nwhat = 3\n").unwrap();
    assert_eq!(triadic(&["theory", "--config", cfg.to_str().unwrap()]), 1);
}
