//! End-to-end tests of the `sunflower` binary: exit-code contract, file
//! formats, determinism, and the shipped recipe set.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sunflower"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn sunflower")
}

fn read_csv_column(path: &Path) -> Vec<(f64, f64)> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| l.starts_with(|c: char| c.is_ascii_digit() || c == '-'))
        .map(|l| {
            let mut it = l.split(',');
            (
                it.next().unwrap().parse().unwrap(),
                it.next().unwrap().parse().unwrap(),
            )
        })
        .collect()
}

#[test]
fn help_and_usage_exit_codes() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["simulate", "--help"]).status.code(), Some(0));
    assert_eq!(run(&["--no-such-flag"]).status.code(), Some(64));
    assert_eq!(run(&["simulate", "--l", "x"]).status.code(), Some(64));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(64));
}

#[test]
fn help_documents_every_flag_with_default() {
    let out = run(&["simulate", "--help"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for flag in [
        "--l", "--m", "--alpha", "--tau", "--history", "--x0prime", "--k", "--T", "--rhs",
        "--sweeps", "--out",
    ] {
        assert!(text.contains(flag), "missing {flag} in simulate --help");
    }
    assert!(text.contains("[default:"), "defaults not documented");
}

#[test]
fn domain_violations_exit_65() {
    let out = run(&[
        "simulate", "--l", "-1", "--m", "5.6", "--alpha", "0.85", "--tau", "4", "--history",
        "6.9", "--x0prime", "2.5",
    ]);
    assert_eq!(out.status.code(), Some(65));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("l must be positive"), "stderr: {err}");

    // missing x0prime at alpha >= 1/2 names the requirement
    let out = run(&[
        "simulate", "--l", "1", "--m", "1", "--alpha", "0.9", "--tau", "1", "--history", "0.02",
    ]);
    assert_eq!(out.status.code(), Some(65));
    assert!(String::from_utf8(out.stderr).unwrap().contains("x0prime"));

    let out = run(&["classify", "--l", "5", "--m", "2", "--alpha", "0.3", "--equilibrium", "x2"]);
    assert_eq!(out.status.code(), Some(65));
}

#[test]
fn simulate_writes_constant_equilibrium_column() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("eq.csv");
    let out = run(&[
        "simulate", "--l", "14", "--m", "5.6", "--alpha", "0.85", "--tau", "4", "--history",
        "6.283185307179586", "--x0prime", "0", "--k", "50", "--T", "40", "--sweeps", "60",
        "--out", out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let rows = read_csv_column(&out_path);
    assert_eq!(rows.len(), 50 + 500 + 1);
    let two_pi = std::f64::consts::TAU;
    for (_, x) in rows {
        assert!((x - two_pi).abs() < 1e-8, "drifted to {x}");
    }
}

#[test]
fn simulate_stable_run_converges_to_equilibrium() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("stable.csv");
    let out = run(&[
        "simulate", "--l", "14", "--m", "5.6", "--alpha", "0.85", "--tau", "4", "--history",
        "6.9", "--x0prime", "2.5", "--k", "100", "--T", "400", "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = read_csv_column(&out_path);
    let last = rows.last().unwrap().1;
    assert!((last - std::f64::consts::TAU).abs() < 0.05, "final {last}");
}

#[test]
fn simulate_departing_run_past_first_critical_delay() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("unstable.csv");
    let out = run(&[
        "simulate", "--l", "14", "--m", "5.6", "--alpha", "0.85", "--tau", "6", "--history",
        "6.9", "--x0prime", "2.5", "--k", "100", "--T", "400", "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = read_csv_column(&out_path);
    let last = rows.last().unwrap().1;
    assert!(
        (last - std::f64::consts::TAU).abs() > 0.05,
        "tau = 6 should not settle at the equilibrium, final {last}"
    );
}

#[test]
fn divergence_exits_2_with_partial_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("partial.csv");
    let out = run(&[
        "simulate", "--l", "5", "--m", "20", "--alpha", "0.3", "--tau", "1", "--history", "1.0",
        "--k", "8", "--T", "4000", "--rhs", "linear-x2", "--out", out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("diverged at step"), "stderr: {err}");
    let rows = read_csv_column(&out_path);
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|(_, x)| x.is_finite()));
}

#[test]
fn classify_emits_verdict_json() {
    let out = run(&["classify", "--l", "3", "--m", "6", "--alpha", "0.3"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["classification"], "stability-switch");
    assert_eq!(v["scan_horizon"], 200.0);
    assert_eq!(v["params"]["l"], 3.0);
    let delays = v["critical_delays"].as_array().unwrap();
    assert_eq!(delays.len(), 2);
    assert!((delays[0].as_f64().unwrap() - 0.567501).abs() < 1e-3);
    assert!((delays[1].as_f64().unwrap() - 10.133).abs() < 0.02);
}

#[test]
fn classify_single_stable_region_fixture() {
    let out = run(&["classify", "--l", "1", "--m", "8", "--alpha", "0.4"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["classification"], "single-stable-region");
    let delays = v["critical_delays"].as_array().unwrap();
    assert!((delays[0].as_f64().unwrap() - 0.0173043).abs() < 1e-4);
}

#[test]
fn classify_x2_reports_witness() {
    let out = run(&[
        "classify", "--equilibrium", "x2", "--l", "5", "--m", "2", "--alpha", "0.3", "--tau",
        "2.8",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["classification"], "always-unstable");
    assert!(v["witness_root"].as_f64().unwrap() > 0.0);
    assert!(v["residual"].as_f64().unwrap() < 1e-12);
}

#[test]
fn classify_dumps_g_curve() {
    let dir = tempfile::tempdir().unwrap();
    let curve_path = dir.path().join("g.csv");
    let out = run(&[
        "classify", "--l", "3", "--m", "6", "--alpha", "0.3", "--dump-curve",
        curve_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&curve_path).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("tau,g_tau"));
    assert_eq!(text.lines().count(), 2 + 2000);
}

#[test]
fn curve_csv_carries_metadata_and_hits_reference_point() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("h2.csv");
    let out = run(&[
        "curve", "--alpha", "0.4", "--which", "h2", "--lrange", "0.5:2", "--points", "7",
        "--out", out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = text.lines();
    let meta: serde_json::Value =
        serde_json::from_str(lines.next().unwrap().trim_start_matches("# ")).unwrap();
    assert_eq!(meta["alpha"], 0.4);
    assert_eq!(meta["which"], "h2");
    assert_eq!(lines.next().unwrap(), "l,m");
    let rows = read_csv_column(&out_path);
    assert_eq!(rows.len(), 7);
    let at_1 = rows.iter().find(|(l, _)| (l - 1.0).abs() < 1e-9).unwrap();
    assert!((at_1.1 - 2.95108).abs() < 1e-2, "h2(1) = {}", at_1.1);
}

#[test]
fn cycles_insufficient_data_exits_3() {
    let out = run(&[
        "cycles", "--l", "14", "--m", "5.6", "--alpha", "0.85", "--tau", "8", "--history",
        "6.9", "--x0prime", "2.5", "--k", "50", "--T", "60",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stderr).unwrap().contains("insufficient"));
}

#[test]
fn out_dir_env_var_resolves_relative_paths() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "simulate", "--l", "3", "--m", "6", "--alpha", "0.3", "--tau", "1", "--history",
            "0.02", "--k", "16", "--T", "4", "--out", "nested/run.csv",
        ])
        .env("SUNFLOWER_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("nested/run.csv").exists());
}

#[test]
fn identical_invocations_produce_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = run(&[
            "simulate", "--l", "14", "--m", "5.6", "--alpha", "0.85", "--tau", "4",
            "--history", "6.9", "--x0prime", "2.5", "--k", "50", "--T", "30", "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn reproduce_empty_file_passes() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("empty.recipe");
    write(&file, "# nothing here\n");
    let out = run(&["reproduce", "--recipes", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("0 recipes"), "{text}");
}

#[test]
fn reproduce_malformed_exits_64_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.recipe");
    write(&file, "name = x\ncommand = classify\n\nthis line has no equals\n");
    let out = run(&["reproduce", "--recipes", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(64));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 4"), "stderr: {err}");
}

#[test]
fn reproduce_detects_regression() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("off.recipe");
    // tau1 deliberately off by 10x the tolerance
    write(
        &file,
        "name = deliberately_off\n\
         command = classify\n\
         l = 3\n\
         m = 6\n\
         alpha = 0.3\n\
         expect.classification = stability-switch\n\
         expect.tau1 = 0.573176\n\
         expect.tau1_atol = 5.675e-4\n",
    );
    let out = run(&["reproduce", "--recipes", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("FAIL"), "{text}");
    assert!(text.contains("1 failed"), "{text}");
}

#[test]
fn reproduce_accepts_json_recipes() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("list.json");
    write(
        &file,
        r#"[{"name": "json_verdict", "command": "classify", "l": 3, "m": 1, "alpha": 0.3,
            "expect.classification": "stable-for-all"}]"#,
    );
    let out = run(&["reproduce", "--recipes", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn reproduce_shipped_reference_runs() {
    let shipped = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../recipes/reference_runs.recipe");
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["reproduce", "--recipes", shipped.to_str().unwrap(), "--jobs", "2"])
        .env("SUNFLOWER_OUT_DIR", dir.path())
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.contains("0 failed"), "{text}");
    // the figure-data files landed under the output directory
    for f in [
        "trajectory_delay4.csv",
        "trajectory_delay15.csv",
        "attractor_delay20.csv",
        "tangency_alpha03.csv",
    ] {
        assert!(dir.path().join(f).exists(), "missing {f}");
    }
}
