//! End-to-end tests of the `oblix` binary: wire formats, determinism of
//! seeded reports, and the exit-code contract (0 ok, 1 usage/parse,
//! 2 identity violated).

use std::path::Path;
use std::process::{Command, Output};

fn oblix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oblix"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.display().to_string()
}

#[test]
fn angles_reports_expected_values() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(
        dir.path(),
        "m.json",
        r#"{"rows":2,"cols":1,"entries":[[1.0,0.0],[0.0,0.0]]}"#,
    );
    let n = write(
        dir.path(),
        "n.json",
        r#"{"rows":2,"cols":1,"entries":[[1.0,0.0],[1.0,0.0]]}"#,
    );
    let out = oblix(&["angles", "--m", &m, "--n", &n]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let c = report["friedrichs_cos"].as_f64().unwrap();
    assert!((c - 1.0 / 2f64.sqrt()).abs() < 1e-12);
    assert_eq!(report["intersection_dim"], 0);
    // non-orthonormal input warned on stderr
    assert!(String::from_utf8_lossy(&out.stderr).contains("re-orthonormalized"));
}

#[test]
fn bounds_report_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(
        dir.path(),
        "s.json",
        r#"{"rows":3,"cols":1,"entries":[[0.6,0.1],[-0.3,0.4],[0.2,0.0]]}"#,
    );
    let args = ["bounds", "--subspace", &s, "--samples", "500", "--seed", "42"];
    let first = oblix(&args);
    let second = oblix(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout, "seeded reports must be byte-identical");
    let report: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(report["samples"], 500);
    assert_eq!(report["seed"], 42);
    for key in ["max_over_Q", "min_mI", "K", "sup_sampled", "witness_Q", "witness_I"] {
        assert!(report.get(key).is_some(), "missing field {key}");
    }
    // a different seed changes the sampled field
    let third = oblix(&["bounds", "--subspace", &s, "--samples", "500", "--seed", "43"]);
    assert!(third.status.success());
    assert_ne!(first.stdout, third.stdout);
}

#[test]
fn experiment_csv_matches_direct_run_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("curve.csv");
    let out = oblix(&[
        "experiment",
        "--kind",
        "truncation",
        "--rule",
        "geometric",
        "--ratio",
        "0.5",
        "--dims",
        "2..5",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("dim,K,min_mI\n"));
    assert_eq!(stdout.lines().count(), 5);
    let file = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(stdout, file);
    // first data line: K(2) = sqrt(5)
    let k2: f64 = stdout.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((k2 - 5f64.sqrt()).abs() < 1e-10);
}

#[test]
fn nullspace_tail_experiment_csv_shape() {
    let out = oblix(&[
        "experiment",
        "--kind",
        "nullspace-tail",
        "--rule",
        "finite",
        "--support",
        "1.0,0.5",
        "--dims",
        "2..4",
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("dim,riesz_constant,max_cos,K\n"));
    assert_eq!(stdout.lines().count(), 4);
}

#[test]
fn missing_file_exits_one() {
    let out = oblix(&["angles", "--m", "/nonexistent.json", "--n", "/nonexistent.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_json_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"rows":1,"cols":1,"entries":[[null,0]]}"#);
    let out = oblix(&["project", "--matrix", &bad, "--weight", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error"));
}

#[test]
fn frames_command_on_generator_spec() {
    let dir = tempfile::tempdir().unwrap();
    let gen = write(
        dir.path(),
        "gen.json",
        r#"{"kind":"nullspace_tail","rule":"geometric","ratio":0.5,"dim":4}"#,
    );
    let out = oblix(&["frames", "--frame", &gen]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // riesz constant = 3/(4^4 - 1) for the ratio-1/2 tail at dim 4
    let riesz = report["riesz_constant"].as_f64().unwrap();
    assert!((riesz - 3.0 / 255.0).abs() < 1e-10);
    assert_eq!(report["sandwich_ok"], true);
}

#[test]
fn enum_cap_env_lowering_yields_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(
        dir.path(),
        "s.json",
        r#"{"rows":4,"cols":1,"entries":[[1.0,0.0],[1.0,0.0],[1.0,0.0],[1.0,0.0]]}"#,
    );
    let out = Command::new(env!("CARGO_BIN_EXE_oblix"))
        .args(["bounds", "--subspace", &s, "--samples", "10", "--seed", "1"])
        .env("OBLIX_ENUM_CAP", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("enumeration cap"));
}
