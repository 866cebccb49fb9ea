//! End-to-end checks of the command-line binary and its exit codes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_logrank"))
}

/// Writes a small self-contained workspace: corpus, keywords, config.
fn setup(dir: &Path) -> PathBuf {
    let corpus = dir.join("corpus/app");
    fs::create_dir_all(&corpus).unwrap();
    let files = [
        ("alpha.py", "def merge_table(table, column):\n    cursor = table.open(column)\n    if cursor.valid:\n        return cursor.fetch(column)\n    return None\n"),
        ("beta.py", "def scan_table(table):\n    for column in table.columns:\n        if column.valid:\n            yield column\n"),
        ("gamma.py", "def rebuild_index(table, column):\n    index = table.index(column)\n    while index.pending:\n        index.advance()\n    return index\n"),
    ];
    for (name, text) in files {
        fs::write(corpus.join(name), text).unwrap();
    }
    fs::write(dir.join("keywords.txt"), "def\nfor\nif\nwhile\nreturn\nyield\nin\nNone\n").unwrap();
    let config = dir.join("config.json");
    fs::write(
        &config,
        r#"{
  "corpus_dir": "corpus",
  "keywords_file": "keywords.txt",
  "sim": {"users": 5, "sessions_per_user": 12, "master_seed": 3},
  "train": {"iterations": 20, "depth": 4},
  "bootstrap": {"resamples": 100, "seed": 3}
}"#,
    )
    .unwrap();
    config
}

#[test]
fn full_cli_flow() {
    let dir = tempfile::tempdir().unwrap();
    let config = setup(dir.path());
    let logs = dir.path().join("logs.jsonl");
    let model = dir.path().join("model.json");
    let artifact = dir.path().join("model.rnkl");

    let out = bin().args(["index", "--config"]).arg(&config).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("files: 3"));

    let out = bin()
        .args(["simulate", "--config"])
        .arg(&config)
        .args(["--arm", "heuristic", "--out"])
        .arg(&logs)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = bin()
        .args(["train", "--config"])
        .arg(&config)
        .arg("--logs")
        .arg(&logs)
        .arg("--out")
        .arg(&model)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = bin()
        .args(["eval-offline", "--config"])
        .arg(&config)
        .arg("--logs")
        .arg(&logs)
        .arg("--model")
        .arg(&model)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("baseline") && text.contains("model"));

    let out = bin()
        .args(["export", "--model"])
        .arg(&model)
        .arg("--out")
        .arg(&artifact)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = bin().args(["inspect", "--artifact"]).arg(&artifact).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("schema hash"));

    let out = bin()
        .args(["abtest", "--config"])
        .arg(&config)
        .args(["--arm-a", "heuristic", "--arm-b"])
        .arg(&artifact)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("TypingActions"));

    let out = bin()
        .args(["importance", "--config"])
        .arg(&config)
        .arg("--logs")
        .arg(&logs)
        .arg("--model")
        .arg(&model)
        .args(["--repeats", "1"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("prefix_length"));
}

#[test]
fn pipeline_subcommand_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let config = setup(dir.path());
    let out_dir = dir.path().join("out");
    let out = bin()
        .args(["pipeline", "--config"])
        .arg(&config)
        .arg("--out-dir")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["logs_heuristic.jsonl", "logs_model.jsonl", "model.json", "model.rnkl", "abtest.json"] {
        assert!(out_dir.join(name).is_file(), "missing {name}");
    }
}

#[test]
fn missing_config_exits_2() {
    let out = bin().args(["index", "--config", "/nonexistent/config.json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn nonexistent_model_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = setup(dir.path());
    let out = bin()
        .args(["abtest", "--config"])
        .arg(&config)
        .args(["--arm-a", "heuristic", "--arm-b", "/nonexistent/model.rnkl"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn corrupt_logs_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let config = setup(dir.path());
    let logs = dir.path().join("bad.jsonl");
    fs::write(&logs, "{\"schema_version\":1,\"feature_schema_hash\":\"xyz\"}\nnot json\n").unwrap();
    let out = bin()
        .args(["train", "--config"])
        .arg(&config)
        .arg("--logs")
        .arg(&logs)
        .args(["--out", "/tmp/ignored-model.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn truncated_artifact_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.rnkl");
    fs::write(&bad, b"RNKL\x01\x00").unwrap();
    let out = bin().args(["inspect", "--artifact"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn oversized_budget_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let config = setup(dir.path());
    let logs = dir.path().join("logs.jsonl");
    let model = dir.path().join("model.json");
    for (args, expect_ok) in [
        (vec!["simulate", "--arm", "heuristic"], true),
        (vec!["train"], true),
    ] {
        let mut cmd = bin();
        cmd.arg(args[0]).arg("--config").arg(&config);
        if args[0] == "simulate" {
            cmd.args(["--arm", "heuristic"]).arg("--out").arg(&logs);
        } else {
            cmd.arg("--logs").arg(&logs).arg("--out").arg(&model);
        }
        let out = cmd.output().unwrap();
        assert_eq!(out.status.success(), expect_ok, "{}", String::from_utf8_lossy(&out.stderr));
    }
    // a budget nothing fits into
    let out = bin()
        .args(["export", "--model"])
        .arg(&model)
        .args(["--out", "/tmp/ignored.rnkl", "--budget", "64"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}
