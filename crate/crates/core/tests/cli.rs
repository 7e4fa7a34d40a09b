use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn smoothcond(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smoothcond"))
        .args(args)
        .env("CONDNUM_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn close(v: &Value, key: &str, expected: f64, tol: f64) {
    let got = v[key].as_f64().unwrap_or_else(|| panic!("{key} missing in {v}"));
    assert!((got - expected).abs() <= tol * expected.abs().max(1.0), "{key}: {got} vs {expected}");
}

#[test]
fn condnum_on_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let id = write(dir.path(), "id.json", r#"{"rows":2,"cols":2,"entries":[[1,0],[0,0],[0,0],[1,0]]}"#);
    let tall = write(dir.path(), "tall.json", r#"{"rows":3,"cols":2,"entries":[[1,0],[0,0],[0,0],[1,0],[0,0],[0,0]]}"#);
    let jordan = write(dir.path(), "jordan.json", r#"{"rows":2,"cols":2,"entries":[[1,0],[1,0],[0,0],[1,0]]}"#);

    let out = smoothcond(&["condnum", "--kind", "square", "--input", &id]);
    assert!(out.status.success());
    close(&stdout_json(&out), "value", 2f64.sqrt(), 1e-14);

    let out = smoothcond(&["condnum", "--kind", "mp", "--input", &tall]);
    assert!(out.status.success());
    close(&stdout_json(&out), "value", 2f64.sqrt(), 1e-14);

    let out = smoothcond(&["condnum", "--kind", "eigen", "--input", &id]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["ill_posed"], Value::Bool(true));

    let out = smoothcond(&["condnum", "--kind", "eigen", "--input", &jordan]);
    let v = stdout_json(&out);
    assert!(v["value"].is_null());
    assert_eq!(v["ill_posed"], Value::Bool(true));
}

#[test]
fn condnum_on_binary_forms() {
    let dir = tempfile::tempdir().unwrap();
    // X0 X1, with zeros (1:0) and (0:1).
    let f = write(
        dir.path(),
        "f.json",
        r#"{"n":1,"degrees":[2],"equations":[[{"alpha":[1,1],"re":1.0,"im":0.0}]]}"#,
    );
    let zero = write(dir.path(), "z.json", r#"{"coords":[[0,0],[1,0]]}"#);
    let not_zero = write(dir.path(), "nz.json", r#"{"coords":[[1,0],[1,0]]}"#);

    let out = smoothcond(&["condnum", "--kind", "polysys", "--input", &f, "--zero", &zero]);
    assert!(out.status.success());
    close(&stdout_json(&out), "value", 1.0, 1e-12);

    let out = smoothcond(&["condnum", "--kind", "polysys", "--input", &f]);
    assert!(out.status.success());
    close(&stdout_json(&out), "value", 1.0, 1e-12);

    let out = smoothcond(&["condnum", "--kind", "polysys", "--input", &f, "--zero", &not_zero]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bound_outputs() {
    let out = smoothcond(&["bound", "--which", "theorem1", "--p", "3", "--m", "2", "--deg", "2", "--t", "1000"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    close(&v, "value", 1.24502e-3, 1e-5);
    assert_eq!(v["valid"], Value::Bool(true));

    let out = smoothcond(&["bound", "--which", "prop-square", "--n", "2"]);
    close(&stdout_json(&out), "expectation", 9.198604, 1e-6);

    let out = smoothcond(&["bound", "--which", "prop-eigen", "--n", "2", "--sigma", "0.1"]);
    close(&stdout_json(&out), "expectation", 15.150348, 1e-6);

    let out = smoothcond(&["bound", "--which", "polysys", "--n", "1", "--d", "3"]);
    close(&stdout_json(&out), "expectation", 9.943755, 1e-6);
}

#[test]
fn bad_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"rows":2,"cols":2,"entries":[[1,0]]}"#);
    let out = smoothcond(&["condnum", "--kind", "square", "--input", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    let out = smoothcond(&["condnum", "--kind", "square", "--input", "/nonexistent/file.json"]);
    assert_eq!(out.status.code(), Some(2));

    let out = smoothcond(&["bound", "--which", "theorem1", "--p", "3", "--m", "2"]);
    assert_eq!(out.status.code(), Some(2));

    let out = smoothcond(&["experiment", "tail", "--family", "square", "--n", "2", "--sigma", "0.5", "--trials", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tail_experiment_writes_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("report.json");
    let csv = dir.path().join("report.csv");
    let out = smoothcond(&[
        "experiment", "tail", "--family", "square", "--n", "2", "--sigma", "0.5", "--t-grid", "10,100,1000",
        "--trials", "2000", "--seed", "3", "--out", json.to_str().unwrap(), "--csv", csv.to_str().unwrap(),
    ]);
    assert!(matches!(out.status.code(), Some(0) | Some(1)));
    assert!(String::from_utf8_lossy(&out.stderr).contains("runtime"));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["tail"].as_array().unwrap().len(), 3);
    assert_eq!(report["pass"].as_bool() == Some(true), out.status.code() == Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("t,"));
    assert_eq!(lines.count(), 3);
}

#[test]
fn failed_check_exits_with_one() {
    // 100 trials cannot resolve a bound of order 1e-5, so the strict rule fails.
    let out = smoothcond(&[
        "experiment", "tail", "--family", "square", "--n", "2", "--sigma", "1", "--t-grid", "10000", "--trials", "100",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let report = stdout_json(&out);
    assert_eq!(report["pass"], Value::Bool(false));
    assert_eq!(report["tail"][0]["resolvable"], Value::Bool(false));
}

#[test]
fn expectation_and_patch_volume_run() {
    let out = smoothcond(&[
        "experiment", "expectation", "--family", "eigen", "--n", "2", "--sigma", "0.5", "--trials", "2000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert!(report["expectation"]["mean_log_cond"].as_f64().unwrap() < report["expectation"]["bound_value"].as_f64().unwrap());

    let out = smoothcond(&["experiment", "patch-volume", "--eps", "0.3", "--trials", "20000"]);
    assert!(matches!(out.status.code(), Some(0) | Some(1)));
    let report = stdout_json(&out);
    assert_eq!(report["eps"].as_f64(), Some(0.3));
    assert!(report["estimate"].as_f64().unwrap() > 0.0);
}
