use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ladderlab_cli::report::{CSV_FILE, CSV_HEADER, META_FILE};
use ladderlab_cli::{Report, RunMeta};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ladderlab"))
}

fn shipped(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

const SMALL_TAIL: &str = r#"{
  "name": "small-tail",
  "seed": 5,
  "task": "tail-experiment",
  "jump_law": { "kind": "zipf", "beta": 1.5 },
  "quantity": "ladder-length",
  "n_paths": 20000,
  "max_steps": 100000,
  "fit": { "method": "hill", "k": 500 }
}"#;

#[test]
fn predict_prints_header_and_bracket() {
    let out = run(&[
        "predict",
        "--config",
        shipped("predict-ladder-cost.json").to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let header = text.lines().next().unwrap();
    assert_eq!(header, CSV_HEADER.join(","));
    assert!(text.contains("tail.ladder-cost"));
}

#[test]
fn output_is_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_TAIL);
    let cfg = cfg.to_str().unwrap();
    let one = run(&["run", "--config", cfg, "--workers", "1"]);
    let four = run(&["run", "--config", cfg, "--workers", "4"]);
    assert!(!one.stdout.is_empty());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(one.status.code(), four.status.code());
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_TAIL);
    let cfg = cfg.to_str().unwrap();
    let a = run(&["run", "--config", cfg, "--seed", "5"]);
    let b = run(&["run", "--config", cfg]);
    let c = run(&["run", "--config", cfg, "--seed", "6"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn out_dir_holds_report_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let status = run(&[
        "verify",
        "--config",
        shipped("spitzer-simple.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--workers",
        "2",
    ]);
    assert_eq!(
        status.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let report = Report::read_csv(&out.join(CSV_FILE)).unwrap();
    assert!(report.passed());
    assert!(report.rows.iter().all(|r| r.wall_time_s.is_empty()));
    let meta: RunMeta =
        serde_json::from_str(&std::fs::read_to_string(out.join(META_FILE)).unwrap()).unwrap();
    assert_eq!(meta.name, "spitzer-simple");
    assert_eq!(meta.workers, 2);
    assert!(meta.passed);

    let summary = run(&["report", "--out", out.to_str().unwrap()]);
    assert_eq!(summary.status.code(), Some(0));
    assert!(String::from_utf8(summary.stdout)
        .unwrap()
        .trim_end()
        .ends_with("PASS"));
}

#[test]
fn timing_flag_fills_wall_time() {
    let out = run(&[
        "predict",
        "--config",
        shipped("predict-ladder-cost.json").to_str().unwrap(),
        "--timing",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().nth(1).unwrap();
    assert!(!row.ends_with(','), "{row}");
}

#[test]
fn failed_check_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    // a prediction with a constant and a tolerance no sample can meet
    let cfg = write_config(
        dir.path(),
        r#"{
  "name": "strict",
  "seed": 3,
  "task": "tail-experiment",
  "jump_law": { "kind": "simple-symmetric" },
  "quantity": "ladder-time",
  "n_paths": 20000,
  "max_steps": 1000000,
  "fit": { "method": "hill", "k": 500 },
  "constant_tolerance": 1e-12
}"#,
    );
    let out = run(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
}

#[test]
fn bad_config_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{ "name": "x", "seed": 1, "task": "predict", "bogus": 1 }"#,
    );
    let out = run(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    let missing = run(&[
        "run",
        "--config",
        dir.path().join("nope.json").to_str().unwrap(),
    ]);
    assert_eq!(missing.status.code(), Some(2));
}
