use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const TRIANGLE: &str =
    r#"{"matroid": {"kind": "free", "n": 3}, "lines": [[0, 1], [1, 2], [0, 2]]}"#;

fn fracmat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracmat"))
        .args(args)
        .env_remove("FRACMAT_BUDGET")
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn arg(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn solve_triangle_then_verify() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "tri.json", TRIANGLE);
    let result = dir.path().join("result.json");
    let out = fracmat(&["solve", arg(&inst), "--out", arg(&result)]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&result).unwrap();
    let json: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(json["objective"], "3/2");
    assert!(json["certificates"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["kind"] == "optimal-pair" && c["verdict"] == "pass"));

    let out = fracmat(&["verify", arg(&inst), arg(&result)]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["passed"], true);
}

#[test]
fn solve_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let inst = write(
        &dir,
        "u.json",
        r#"{"matroid": {"kind": "uniform", "n": 5, "k": 3}, "lines": [[0, 1], [1, 2], [3, 4], [2]], "weights": ["3", "1/2", "2", "1"]}"#,
    );
    let a = fracmat(&["solve", arg(&inst), "--seed", "7"]);
    let b = fracmat(&["solve", arg(&inst), "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn perfect_and_max_size_modes() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "tri.json", TRIANGLE);
    for flag in ["--perfect", "--max-size"] {
        let out = fracmat(&["solve", arg(&inst), flag]);
        assert!(out.status.success(), "{flag}");
        assert_eq!(stdout_json(&out)["objective"], "3/2", "{flag}");
    }
}

#[test]
fn no_perfect_matching_exits_two() {
    let dir = TempDir::new().unwrap();
    let inst = write(
        &dir,
        "one.json",
        r#"{"matroid": {"kind": "free", "n": 3}, "lines": [[0, 1]]}"#,
    );
    let out = fracmat(&["solve", arg(&inst), "--perfect"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no perfect fractional matching"));
}

#[test]
fn malformed_json_exits_one_with_position() {
    let dir = TempDir::new().unwrap();
    let inst = write(
        &dir,
        "bad.json",
        "{\"matroid\": {\"kind\": \"free\", \"n\": 3},\n \"lines\": [[0, 1],]}",
    );
    let out = fracmat(&["solve", arg(&inst)]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn budget_errors_name_the_cap() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "tri.json", TRIANGLE);
    let out = Command::new(env!("CARGO_BIN_EXE_fracmat"))
        .args(["solve", arg(&inst)])
        .env("FRACMAT_BUDGET", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains('3'));
    let out = fracmat(&["solve", arg(&inst), "--budget", "3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn tampered_results_fail_verification() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "tri.json", TRIANGLE);
    let out = fracmat(&["solve", arg(&inst)]);
    let result: Value = stdout_json(&out);

    let mut objective = result.clone();
    objective["objective"] = "2".into();
    let path = write(&dir, "obj.json", &objective.to_string());
    let out = fracmat(&["verify", arg(&inst), arg(&path)]);
    assert_eq!(out.status.code(), Some(1));
    let report = stdout_json(&out);
    let pair = report["certificates"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["kind"] == "optimal-pair")
        .unwrap()
        .clone();
    assert_eq!(pair["verdict"], "fail");

    let mut dual = result.clone();
    dual["dual"][0]["coeff"] = "1/4".into();
    let path = write(&dir, "dual.json", &dual.to_string());
    let out = fracmat(&["verify", arg(&inst), arg(&path)]);
    assert_eq!(out.status.code(), Some(1));
    let failed: Vec<String> = stdout_json(&out)["certificates"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["verdict"] == "fail")
        .map(|c| c["kind"].as_str().unwrap().to_string())
        .collect();
    assert!(
        failed
            .iter()
            .any(|k| k == "dual-feasible" || k == "optimal-pair"),
        "{failed:?}"
    );
}

#[test]
fn inspect_triangle() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "tri.json", TRIANGLE);
    let out = fracmat(&["inspect", arg(&inst), "--flats", "--dominant-cover"]);
    assert!(out.status.success());
    let report = stdout_json(&out);
    assert_eq!(report["flats"].as_array().unwrap().len(), 8);
    let cover = &report["dominant_cover"];
    assert_eq!(cover["lower"], serde_json::json!([]));
    assert_eq!(cover["upper"], serde_json::json!([0, 1, 2]));
    assert_eq!(cover["value"], "3/2");
}

#[test]
fn inspect_constraints_without_lines_is_empty() {
    let dir = TempDir::new().unwrap();
    let inst = write(
        &dir,
        "none.json",
        r#"{"matroid": {"kind": "uniform", "n": 4, "k": 2}, "lines": []}"#,
    );
    let out = fracmat(&["inspect", arg(&inst), "--constraints"]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["constraints"], serde_json::json!([]));
}

#[test]
fn sweep_summary_and_report() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("sweep.json");
    let out = fracmat(&[
        "sweep",
        "--seed",
        "1",
        "--count",
        "50",
        "--report",
        arg(&report),
    ]);
    assert!(out.status.success());
    let summary = stdout_json(&out);
    assert_eq!(summary["oracle_equal"], 50);
    assert_eq!(summary["passed"], 50);
    let full: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(full["instances"].as_array().unwrap().len(), 50);

    let again = fracmat(&["sweep", "--seed", "1", "--count", "50"]);
    assert_eq!(again.stdout, out.stdout);
}

#[test]
fn empty_sweep() {
    let out = fracmat(&["sweep", "--count", "0"]);
    assert!(out.status.success());
    let summary = stdout_json(&out);
    assert_eq!(summary["count"], 0);
    assert_eq!(summary["passed"], 0);
}
