use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use lsq_core::report::ScoreRecord;
use serde_json::Value;

fn lsq(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lsq"))
        .current_dir(dir)
        .args(args)
        .env_remove("LSQ_API_KEY")
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = lsq(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn error_line(out: &Output) -> Value {
    let stderr = String::from_utf8_lossy(&out.stderr);
    let last = stderr.lines().last().unwrap();
    serde_json::from_str::<Value>(last).unwrap()["error"].clone()
}

fn scores(path: &Path) -> Vec<ScoreRecord> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn oracle_pipeline_scores_one() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let gen = ok(
        d,
        &["gen", "--n", "4", "--seed", "9", "--min-tokens", "4000"],
    );
    assert!(gen.contains("wrote 12 instances"));
    let run = ok(d, &["run"]);
    assert!(run.contains("12 requests issued"), "{run}");
    let summary = ok(d, &["score"]);
    assert!(
        summary.contains("mock-oracle mrcr: n=4 mean=1.0000"),
        "{summary}"
    );
    let all = scores(&d.join("scores.jsonl"));
    assert_eq!(all.len(), 12);
    assert!(all.iter().all(|s| s.score == 1.0));

    let report = ok(d, &["report", "--slice", "complexity"]);
    assert!(report.contains("curves.csv"));
    let csv = fs::read_to_string(d.join("report/curves.csv")).unwrap();
    assert!(csv.starts_with("model_id,task,bucket,context_tokens,cumulative_mean,n,slice"));
    assert!(d.join("report/mock-oracle_mrcr_complexity.svg").exists());
    let summary: Value =
        serde_json::from_str(&fs::read_to_string(d.join("report/summary.json")).unwrap()).unwrap();
    assert!(summary.to_string().contains("\"mean\":1.0"));
}

#[test]
fn silent_mock_scores_zero_on_mrcr() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &["gen", "--tasks", "mrcr", "--n", "3", "--min-tokens", "4000"],
    );
    ok(d, &["run", "--provider", "mock:silent"]);
    ok(d, &["score"]);
    assert!(scores(&d.join("scores.jsonl"))
        .iter()
        .all(|s| s.score == 0.0));
}

#[test]
fn resume_and_overwrite_rules() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &["gen", "--tasks", "idk", "--n", "5", "--min-tokens", "2000"],
    );
    ok(d, &["run"]);
    let refused = lsq(d, &["run"]);
    assert_eq!(refused.status.code(), Some(1));
    assert_eq!(error_line(&refused)["kind"], "usage");
    assert!(ok(d, &["run", "--resume"]).contains("0 requests issued"));
    assert!(ok(d, &["run", "--overwrite"]).contains("5 requests issued"));
}

#[test]
fn generation_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = ["gen", "--n", "6", "--seed", "4", "--min-tokens", "3000"];
    ok(d, &[&args[..], &["--out", "a.jsonl"]].concat());
    ok(d, &[&args[..], &["--out", "b.jsonl"]].concat());
    ok(
        d,
        &[
            "gen",
            "--n",
            "6",
            "--seed",
            "5",
            "--min-tokens",
            "3000",
            "--out",
            "c.jsonl",
        ],
    );
    let (a, b, c) = (
        fs::read(d.join("a.jsonl")).unwrap(),
        fs::read(d.join("b.jsonl")).unwrap(),
        fs::read(d.join("c.jsonl")).unwrap(),
    );
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("lsq.toml"),
        "n = 2\ntasks = [\"idk\"]\nmin_tokens = 2000\nseed = 8\n",
    )
    .unwrap();
    let out = lsq(d, &["--config", "lsq.toml", "gen", "--n", "3"]);
    assert!(out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    let config: Value = serde_json::from_str(stderr.lines().next().unwrap()).unwrap();
    assert_eq!(config["config"]["n"], 3);
    assert_eq!(config["config"]["seed"], 8);
    assert_eq!(
        fs::read_to_string(d.join("instances.jsonl"))
            .unwrap()
            .lines()
            .count(),
        3
    );

    fs::write(d.join("bad.toml"), "colour = \"red\"\n").unwrap();
    let out = lsq(d, &["--config", "bad.toml", "gen"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    let usage = lsq(d, &["frobnicate"]);
    assert_eq!(usage.status.code(), Some(1));
    assert_eq!(error_line(&usage)["kind"], "usage");

    // Secrets are never accepted on the command line.
    let flag = lsq(d, &["run", "--api-key", "abc"]);
    assert_eq!(flag.status.code(), Some(1));

    let missing = lsq(d, &["score", "--instances", "nope.jsonl"]);
    assert_eq!(missing.status.code(), Some(2));
    assert_eq!(error_line(&missing)["kind"], "data");

    fs::write(d.join("instances.jsonl"), "{\"id\": 1}\n").unwrap();
    let malformed = lsq(d, &["run"]);
    assert_eq!(malformed.status.code(), Some(2));

    ok(
        d,
        &["gen", "--tasks", "idk", "--n", "2", "--min-tokens", "2000"],
    );
    fs::write(
        d.join("dead.toml"),
        "endpoint = \"http://127.0.0.1:9/v1\"\nmodel = \"m\"\nrequire_secret = false\ntimeout_secs = 2\n",
    )
    .unwrap();
    let transport = lsq(
        d,
        &["run", "--provider", "http:dead.toml", "--retries", "0"],
    );
    assert_eq!(
        transport.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&transport.stderr)
    );
    assert_eq!(error_line(&transport)["kind"], "transport");

    fs::write(d.join("keyed.toml"), "endpoint = \"http://127.0.0.1:9/v1\"\nmodel = \"m\"\nsecret_env = \"LSQ_TEST_UNSET_KEY\"\n").unwrap();
    let no_secret = lsq(d, &["run", "--provider", "http:keyed.toml", "--overwrite"]);
    assert_eq!(no_secret.status.code(), Some(1));
    assert!(error_line(&no_secret)["message"]
        .as_str()
        .unwrap()
        .contains("LSQ_TEST_UNSET_KEY"));
}

#[test]
fn chance_reports_rates() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = ok(
        d,
        &[
            "chance",
            "--task",
            "idk",
            "--samples",
            "40",
            "--min-tokens",
            "2000",
        ],
    );
    assert!(out.contains("idk analytic: 25.00%"));
    let out = ok(d, &["chance", "--task", "latent_list", "--trials", "200"]);
    assert_eq!(out.lines().count(), 4);
}
