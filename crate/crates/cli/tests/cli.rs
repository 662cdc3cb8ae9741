use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use stabilis::synth::{production_like, raw_schema, write_raw_csv, LABEL_ATTRIBUTE};

fn stabilis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stabilis")).args(args).output().unwrap()
}

fn write_fixture(dir: &Path) -> std::path::PathBuf {
    let log_path = dir.join("production.csv");
    write_raw_csv(&production_like(5), &raw_schema(), fs::File::create(&log_path).unwrap()).unwrap();
    let config = serde_json::json!({
        "log": "production.csv",
        "output_dir": "out",
        "schema": raw_schema(),
        "labeling": {"kind": "external_column", "attribute": LABEL_ATTRIBUTE},
        "approaches": ["XGB_agg", "RF_agg"],
        "iterations": 2,
        "seed": 3
    });
    let config_path = dir.join("config.json");
    fs::write(&config_path, config.to_string()).unwrap();
    config_path
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn prep_reports_stats_and_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_fixture(dir.path());
    let cfg = config.to_str().unwrap();
    let out = stabilis(&["prep", "--config", cfg]);
    assert!(out.status.success(), "{}", stderr(&out));

    let prep = dir.path().join("out/prep");
    let stats = fs::read_to_string(prep.join("stats.csv")).unwrap();
    let mut lines = stats.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n_traces,pos_class_ratio,median_length,max_length,trunc_length,n_events"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "220");
    assert_eq!(row[3], "78");
    assert_eq!(row[5], "2275");

    let first: Vec<Vec<u8>> = ["train.csv", "test.csv", "schema.json", "stats.csv"]
        .iter()
        .map(|f| fs::read(prep.join(f)).unwrap())
        .collect();
    assert!(stabilis(&["prep", "--config", cfg]).status.success());
    for (f, before) in ["train.csv", "test.csv", "schema.json", "stats.csv"].iter().zip(first) {
        assert_eq!(fs::read(prep.join(f)).unwrap(), before, "{f} changed on rerun");
    }
}

#[test]
fn missing_timestamp_column_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("log.csv");
    fs::write(&log, "case_id,activity\nc1,A\n").unwrap();
    let out = stabilis(&["prep", "--log", log.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("timestamp"), "{}", stderr(&out));
}

#[test]
fn run_and_report_produce_tables() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_fixture(dir.path());
    let cfg = config.to_str().unwrap();
    assert!(stabilis(&["prep", "--config", cfg]).status.success());
    let out = stabilis(&[
        "run",
        "--config",
        cfg,
        "--strategy",
        "combined_5run",
        "--alpha-grid",
        "0.1,0.25,0.5,0.75,0.9",
        "--jobs",
        "1",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));

    let root = dir.path().join("out");
    let manifest: Value = serde_json::from_str(&fs::read_to_string(root.join("manifest.json")).unwrap()).unwrap();
    let approaches = manifest["approaches"].as_array().unwrap();
    assert_eq!(approaches.len(), 2);
    for entry in approaches {
        assert_eq!(entry["status"], "ok");
        for candidate in entry["search"]["candidates"].as_array().unwrap() {
            assert_eq!(candidate["run_seeds"].as_array().unwrap().len(), 5);
        }
    }
    assert!(root.join("models/XGB_agg.json").exists() && root.join("models/RF_agg.json").exists());
    let summary = fs::read_to_string(root.join("reports/summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 2 * 6);

    let out = stabilis(&["report", "--out", root.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let figures = root.join("figures");
    for f in ["auc_vs_prefix.csv", "ts_vs_alpha.csv", "auc_vs_alpha.csv", "ts_vs_auc.csv"] {
        assert!(figures.join(f).exists(), "{f}");
    }
    let scatter = fs::read_to_string(figures.join("ts_vs_auc.csv")).unwrap();
    assert_eq!(scatter.lines().count(), 1 + 2 * 6);
    let first = fs::read(figures.join("auc_vs_prefix.csv")).unwrap();
    assert!(stabilis(&["report", "--out", root.to_str().unwrap()]).status.success());
    assert_eq!(fs::read(figures.join("auc_vs_prefix.csv")).unwrap(), first);
}

#[test]
fn run_without_prep_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = stabilis(&["run", "--out", dir.path().to_str().unwrap(), "--approach", "XGB_agg"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("stabilis prep"), "{}", stderr(&out));
}

#[test]
fn report_on_empty_dir_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = stabilis(&["report", "--out", dir.path().to_str().unwrap()]);
    assert!(!out.status.success());
}

#[test]
fn suggest_truncation_prints_a_length() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_fixture(dir.path());
    let out = stabilis(&["suggest-truncation", "--config", config.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let n: usize = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!((1..=78).contains(&n));
}

#[test]
fn unknown_approach_is_rejected() {
    let out = stabilis(&["run", "--approach", "LSTM"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("LSTM"));
}
