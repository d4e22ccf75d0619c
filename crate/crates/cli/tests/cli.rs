use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn diffeo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diffeo")).args(args).output().expect("spawn diffeo")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {}", stdout(out)))
}

fn config(name: &str, body: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(format!("diffeo-{name}.json"));
    std::fs::write(&path, body).expect("write config");
    path
}

#[test]
fn free_three_vertex() {
    let out = diffeo(&["rules", "--n", "3", "--format", "pretty"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "2*i*a1*(x1+x2+x3)\n");

    let v = json(&diffeo(&["rules", "--n", "3"]));
    assert_eq!(v["valence"], 3);
    assert_eq!(v["terms"].as_array().map(Vec::len), Some(3));
}

#[test]
fn phi4_three_vertex_vanishes() {
    let out = diffeo(&["rules", "--n", "3", "--kind", "interaction", "--s", "4", "--format", "pretty"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "0");
}

#[test]
fn three_leg_tree_sum() {
    let v = json(&diffeo(&["treesum", "--kind", "b", "--n", "3"]));
    assert_eq!(v["value"], "-6*a2+12*a1^2");
    assert_eq!(v["tree_count"], 4);
}

#[test]
fn phi3_four_point_cancels() {
    let out = diffeo(&["treesum", "--kind", "S", "--n", "4", "--s", "3"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["value"], "0");
}

#[test]
fn trace_lists_every_tree() {
    let v = json(&diffeo(&["treesum", "--kind", "b", "--n", "3", "--trace"]));
    assert_eq!(v["trace"].as_array().map(Vec::len), Some(4));
}

#[test]
fn numeric_coefficients_from_config() {
    let path = config("numeric", r#"{"diffeo": {"a": ["1", "1/2"]}}"#);
    let out = diffeo(&["--config", path.to_str().unwrap(), "treesum", "--kind", "b", "--n", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["value"], "-1");
}

#[test]
fn offshell_list_is_checked() {
    let out = diffeo(&["treesum", "--kind", "A", "--n", "4", "--offshell", "1,7"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());

    let out = diffeo(&["treesum", "--kind", "b", "--n", "3", "--offshell", "all"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bn_check_passes() {
    let out = diffeo(&["verify", "--check", "bn", "--max-n", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["reports"][0]["status"], "pass");
}

#[test]
fn injected_fault_fails_with_witness() {
    let path = config("fault", r#"{"suite": {"fault": {"kind": "perturb_diffeo_coefficient", "index": 2}}}"#);
    let out = diffeo(&["--config", path.to_str().unwrap(), "verify", "--check", "bn", "--max-n", "4"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["pass"], false);
    assert_eq!(v["reports"][0]["witness"]["n"], 3);
}

#[test]
fn malformed_config_is_a_config_error() {
    let path = config("malformed", r#"{"theory": {"propagator": "standard""#);
    let out = diffeo(&["--config", path.to_str().unwrap(), "rules", "--n", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("configuration error"));

    let path = config("a0", r#"{"diffeo": {"a": ["2"]}}"#);
    assert_eq!(diffeo(&["--config", path.to_str().unwrap(), "rules", "--n", "3"]).status.code(), Some(2));
}

#[test]
fn unknown_check_is_a_usage_error() {
    let out = diffeo(&["verify", "--check", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("known checks"));
}

#[test]
fn json_is_byte_identical_across_runs() {
    let args = ["--seed", "7", "verify", "--check", "kinematics", "--check", "series", "--max-n", "4", "--trials", "5", "--order", "6"];
    let first = diffeo(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, diffeo(&args).stdout);
}

#[test]
fn csv_has_one_row_per_report() {
    let out = diffeo(&["verify", "--check", "bn", "--check", "series", "--max-n", "3", "--order", "4", "--trials", "2", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("check,max_n,s,"));
}
