use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

const CURVE_37: &str = r#"{"p": "37", "f": ["2", "29", "12", "33", "20", "15", "28", "1", "0"]}"#;

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("trigonal-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trigonal")).args(args).output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr_error(out: &Output) -> Value {
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    v["error"].clone()
}

#[test]
fn expectation_default() {
    let v = stdout_json(&run(&["expectation"]));
    assert_eq!(v["decimal"], "0.1857");
    assert!(v["value"].as_str().unwrap().contains('/'));
}

#[test]
fn expectation_bad_probability() {
    let out = run(&["expectation", "--success-prob", "5/4"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_error(&out)["code"], "BadRational");
}

#[test]
fn analyze_example_curve() {
    let curve = scratch("analyze.json", CURVE_37);
    let v = stdout_json(&run(&["analyze", "--curve", curve.to_str().unwrap()]));
    assert_eq!(v["num_tractable"], 1);
    assert_eq!(v["pattern"], serde_json::json!([6, 1, 1]));
    assert_eq!(v["subgroups"][0]["trigonal_rational"], true);
    assert_eq!(v["subgroups"][0]["isogeny_rational"], true);
}

#[test]
fn isogeny_report_both_signs() {
    let curve = scratch("isogeny.json", CURVE_37);
    for sign in ["+", "-"] {
        let v = stdout_json(&run(&["isogeny", "--curve", curve.to_str().unwrap(), "--sign", sign]));
        assert_eq!(v["sign"], if sign == "+" { 1 } else { -1 });
        assert_eq!(v["isogeny_rational"], true);
        assert_eq!(v["x_model"].as_array().unwrap().len(), 3);
        assert_eq!(v["quadrics"].as_array().unwrap().len(), 6);
    }
}

#[test]
fn map_example_divisor() {
    let curve = scratch("map.json", CURVE_37);
    let div = r#"{"points_plus": [["10", "28"]], "points_minus": [["14", "6"]]}"#;
    let v = stdout_json(&run(&["map", "--curve", curve.to_str().unwrap(), "--divisor", div]));
    assert_eq!(v["degree"], 0);
    let positive: i64 = v["terms"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|t| t["weight"].as_i64().unwrap() > 0)
        .map(|t| t["weight"].as_i64().unwrap() * t["field_degree"].as_i64().unwrap())
        .sum();
    assert_eq!(positive, 2);
}

#[test]
fn map_rejects_points_off_curve() {
    let curve = scratch("map_bad.json", CURVE_37);
    let div = scratch("div_bad.json", r#"{"points_plus": [["10", "27"]], "points_minus": [["14", "6"]]}"#);
    let out = run(&["map", "--curve", curve.to_str().unwrap(), "--divisor", div.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_example_curve() {
    let curve = scratch("verify.json", CURVE_37);
    let v = stdout_json(&run(&["verify", "--curve", curve.to_str().unwrap(), "--trials", "4", "--seed", "3"]));
    assert_eq!(v["summary"]["jacobian_order"], "55666");
    assert_eq!(v["summary"]["consensus_sign"], 1);
    assert_eq!(v["fiber_checks"]["checked"], v["fiber_checks"]["agreed"]);
}

#[test]
fn survey_is_reproducible_and_writes_csv() {
    let csv = scratch("survey.csv", "");
    let args = ["survey", "--prime", "1009", "--samples", "64", "--seed", "9", "--csv", csv.to_str().unwrap()];
    let a = stdout_json(&run(&args));
    let first = std::fs::read_to_string(&csv).unwrap();
    let b = stdout_json(&run(&args));
    assert_eq!(a, b);
    assert_eq!(first, std::fs::read_to_string(&csv).unwrap());
    let mut lines = first.lines();
    assert_eq!(lines.next(), Some("trial,pattern,num_tractable,num_trig_rational,num_isog_rational,success"));
    assert_eq!(lines.count(), 64);
}

#[test]
fn parse_errors_exit_two() {
    let out = run(&["analyze", "--curve", "/nonexistent/curve.json"]);
    assert_eq!(out.status.code(), Some(2));
    let bad = scratch("bad.json", r#"{"p": "35", "f": ["1"]}"#);
    let out = run(&["analyze", "--curve", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_error(&out)["kind"], "parse");
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn math_errors_exit_one() {
    // trigonal map not rational
    let curve = scratch("math.json", r#"{"p": "37", "f": ["8","36","4","16","7","31","28","30","1"]}"#);
    let out = run(&["isogeny", "--curve", curve.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_error(&out)["kind"], "math");
    assert_eq!(stderr_error(&out)["code"], "NotRational");
    // x⁸ + 2 has a degenerate transversal system
    let curve = scratch("degenerate.json", r#"{"p": "37", "f": ["2","0","0","0","0","0","0","0","1"]}"#);
    assert_eq!(run(&["isogeny", "--curve", curve.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn non_rational_isogeny_is_reported() {
    let curve = scratch("nonrational.json", r#"{"p": "37", "f": ["5","1","0","0","0","0","0","0","1"]}"#);
    let v = stdout_json(&run(&["isogeny", "--curve", curve.to_str().unwrap()]));
    assert_eq!(v["trigonal_rational"], true);
    assert_eq!(v["isogeny_rational"], false);
    let out = run(&["verify", "--curve", curve.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}
