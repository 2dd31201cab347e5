//! End-to-end behavior of the `bridgelab` binary: output formats, override
//! flags, exit codes, and byte-level determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bridgelab_cli::config::{self, Experiment};

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_bridgelab")
}

fn run(args: &[&str]) -> Output {
    Command::new(binary()).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header: Vec<String> =
        lines.next().expect("header").split(',').map(|s| s.to_string()).collect();
    let rows = lines
        .map(|line| line.split(',').map(|cell| cell.parse().expect("numeric cell")).collect())
        .collect();
    (header, rows)
}

const SMALL_PROPAGATE: &str =
    "experiment = propagate\nschedule.t = 0.5\nschedule.dt = 0.05\nschedule.n_samples = 3\n";

#[test]
fn csv_output_has_the_declared_shape() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "p.conf", SMALL_PROPAGATE);
    let out = dir.path().join("table.csv");
    let result = run(&["propagate", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    assert!(result.stdout.is_empty(), "file output should not also print");

    let text = fs::read_to_string(&out).unwrap();
    assert!(text.ends_with('\n') && !text.contains('\r'));
    let (header, rows) = parse_csv(&text);
    assert_eq!(
        header,
        ["time", "variance_grid", "variance_oracle", "l2_error", "energy_drift"]
    );
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.len() == 5 && r.iter().all(|v| v.is_finite())));
}

#[test]
fn format_override_emits_valid_json() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "p.conf", SMALL_PROPAGATE);
    let result = run(&["propagate", "--config", config.to_str().unwrap(), "--format", "json"]);
    assert!(result.status.success());
    let parsed: serde_json::Value = serde_json::from_slice(&result.stdout).unwrap();
    assert_eq!(parsed["columns"][0], "time");
    assert_eq!(parsed["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn config_problems_exit_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("unknown.conf", "experiment = propagate\nbogus.key = 1\n"),
        ("malformed.conf", "experiment = propagate\nnot a key value line\n"),
        ("mismatch.conf", "experiment = bridge\n"),
        ("badvalue.conf", "experiment = propagate\nphysics.hbar = -2\n"),
        ("badgrid.conf", "experiment = propagate\ngrid.n = 1000\n"),
    ];
    for (name, body) in cases {
        let config = write_config(dir.path(), name, body);
        let result = run(&["propagate", "--config", config.to_str().unwrap()]);
        assert_eq!(result.status.code(), Some(2), "{name}: {}", String::from_utf8_lossy(&result.stderr));
        assert!(!result.stderr.is_empty(), "{name} should explain itself");
    }
    // A missing file is also a configuration problem.
    let result = run(&["propagate", "--config", dir.path().join("absent.conf").to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn starved_solver_exits_with_code_3_and_reports_the_residual() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "starved.conf",
        "experiment = bridge\nphysics.sigma = 1.5\nschedule.t = 2.0\nschedule.tau = 0.3\nsolver.max_iter = 2\n",
    );
    let result = run(&["bridge", "--config", config.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("residual"), "stderr was: {stderr}");
}

#[test]
fn runtime_failures_exit_with_code_1() {
    let dir = tempfile::tempdir().unwrap();
    // An oversized backward step collapses the exact-engine variance.
    let config = write_config(
        dir.path(),
        "collapse.conf",
        "experiment = curvature\nschedule.dt = 4.0\nschedule.n_samples = 1\n",
    );
    let result = run(&["curvature", "--config", config.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(1), "{}", String::from_utf8_lossy(&result.stderr));
}

#[test]
fn fixed_seed_runs_are_byte_identical_and_seeds_matter() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "sweep.conf",
        "experiment = nlgt-sweep\nschedule.n_samples = 7\nseed = 5\n",
    );
    let first = run(&["nlgt-sweep", "--config", config.to_str().unwrap()]);
    let second = run(&["nlgt-sweep", "--config", config.to_str().unwrap()]);
    assert!(first.status.success() && second.status.success());
    assert_eq!(first.stdout, second.stdout);

    let reseeded = run(&["nlgt-sweep", "--config", config.to_str().unwrap(), "--seed", "6"]);
    assert!(reseeded.status.success());
    assert_ne!(first.stdout, reseeded.stdout, "a different seed must change the state");
}

#[test]
fn shipped_configs_parse_cleanly() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let cases = [
        ("propagate.conf", Experiment::Propagate),
        ("bridge.conf", Experiment::Bridge),
        ("collapse.conf", Experiment::Collapse),
        ("nlgt_sweep.conf", Experiment::NlgtSweep),
        ("curvature.conf", Experiment::Curvature),
        ("check.conf", Experiment::Check),
    ];
    for (name, experiment) in cases {
        let text = fs::read_to_string(root.join(name)).unwrap();
        config::load(&text, experiment).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}
