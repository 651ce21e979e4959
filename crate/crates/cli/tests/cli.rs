use std::path::Path;
use std::process::{Command, Output};

use liberata::citation_weighting::WeightingPipeline;
use liberata::corpus::{fixture, write_corpus_dir};
use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liberata"))
        .arg("--corpus")
        .arg(dir)
        .args(args)
        .output()
        .unwrap()
}

fn fixture_dir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    write_corpus_dir(&fixture::corpus(), dir.path()).unwrap();
    dir
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn validate_accepts_fixture() {
    let dir = fixture_dir();
    let o = run(dir.path(), &["validate"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "valid,manuscripts,contributors,shares,transactions\ntrue,3,3,6,1\n");
}

#[test]
fn validate_rejects_short_shares() {
    let dir = fixture_dir();
    let path = dir.path().join("shares.jsonl");
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("\"share\":0.3"));
    std::fs::write(&path, text.replacen("\"share\":0.3", "\"share\":0.29", 1)).unwrap();
    let o = run(dir.path(), &["validate"]);
    assert_eq!(o.status.code(), Some(2));
    let report: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(report["valid"], Value::Bool(false));
    let rules: Vec<&str> = report["violations"].as_array().unwrap().iter().map(|v| v["rule"].as_str().unwrap()).collect();
    assert_eq!(rules, ["share-sum"]);
    assert_eq!(report["violations"][0]["entity"], "m1");
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let dir = fixture_dir();
    let o = run(dir.path(), &["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
}

#[test]
fn missing_manuscript_is_reported() {
    let dir = fixture_dir();
    let o = run(dir.path(), &["similar", "--to", "m9"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("m9"));
}

#[test]
fn weighting_specs_round_trip() {
    for spec in ["base=inv_ref", "base=inv_ref,acsm,pubrate,imwc:4", "base=unweighted,imwc:2", "tmwc:1.5,acsm"] {
        let p: WeightingPipeline = spec.parse().unwrap();
        let again: WeightingPipeline = p.to_string().parse().unwrap();
        assert_eq!(p, again, "{spec}");
    }
    assert!("acsm,acsm".parse::<WeightingPipeline>().is_err());
    assert!("imwc:5".parse::<WeightingPipeline>().is_err());
}

#[test]
fn weighting_flag_changes_capital() {
    let dir = fixture_dir();
    let base = stdout(&run(dir.path(), &["refs", "--op", "capital"]));
    assert_eq!(base, "manuscript,capital,raw_capital\nm1,1.5,1.5\nm2,0.5,0.5\nm3,0.0,0.0\n");
    let o = run(dir.path(), &["--weighting", "base=inv_ref,acsm", "refs", "--op", "capital"]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert!(lines[1].starts_with("m1,1.32"), "{}", lines[1]);
}

#[test]
fn json_rows_and_contributor_capital() {
    let dir = fixture_dir();
    let o = run(dir.path(), &["--json", "capital", "--who", "contributor"]);
    let rows: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let caps: Vec<f64> = rows.iter().map(|r| r["capital"].as_f64().unwrap()).collect();
    for (got, want) in caps.iter().zip([1.05, 0.75, 0.2]) {
        assert!((got - want).abs() < 1e-12, "{caps:?}");
    }
    assert_eq!(rows[0]["contributor"], "c1");
}

#[test]
fn synth_requires_out() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["synth"]);
    assert_eq!(o.status.code(), Some(1));
    let out = dir.path().join("gen");
    let o = Command::new(env!("CARGO_BIN_EXE_liberata"))
        .args(["synth", "--manuscripts", "30", "--contributors", "10", "--seed", "3", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(run(&out, &["validate"]).status.code(), Some(0));
}

#[test]
fn matrix_market_export() {
    let dir = fixture_dir();
    let mtx = dir.path().join("w.mtx");
    let o = Command::new(env!("CARGO_BIN_EXE_liberata"))
        .arg("--corpus")
        .arg(dir.path())
        .arg("--out")
        .arg(&mtx)
        .args(["refs", "--op", "matrix", "--format", "mtx"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&mtx).unwrap();
    assert!(text.starts_with("%%MatrixMarket"));
}
