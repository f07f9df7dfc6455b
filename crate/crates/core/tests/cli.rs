//! The `dunkl` binary end to end.

use std::process::Command;

fn dunkl(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_dunkl")).args(args).output().unwrap()
}

#[test]
fn basis_json_names_zt() {
    let out = dunkl(&["basis", "--m", "3", "--ell", "1", "--kappa", "0.25", "--degree", "2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let entry = v.as_array().unwrap().iter().find(|e| e["label"] == "p1_1").unwrap();
    assert_eq!(entry["terms"], serde_json::json!([{"a": 1, "b": 0, "component": "t", "re": 1.0, "im": 0.0}]));
}

#[test]
fn negative_kappa_outside_regime_gives_negative_norm() {
    let out = dunkl(&["norms", "--m", "5", "--ell", "1", "--kappa", "-0.3", "--degree", "6"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert!(rows.iter().all(|r| r["rel_err"].as_f64().unwrap() < 1e-12));
    assert!(rows.iter().any(|r| r["closed"].as_f64().unwrap() < 0.0));
}

#[test]
fn weight_rows_have_constant_det() {
    let out = dunkl(&["weight", "--m", "4", "--ell", "1", "--kappa", "0.2", "--points", "40"]);
    assert_eq!(out.status.code(), Some(0));
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).unwrap();
    let dets: Vec<f64> = rows.iter().map(|r| r["det"].as_f64().unwrap()).collect();
    let (lo, hi) = dets.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &d| (a.min(d), b.max(d)));
    assert!(hi - lo < 1e-12);
    assert!(rows.iter().all(|r| r["min_eig"].as_f64().unwrap() > 0.0));
}

#[test]
fn output_file_and_gram() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gram.json");
    let out = dunkl(&["gram", "--m", "3", "--degree", "3", "--form", "quadrature", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["positive_definite"], true);
    assert_eq!(v["labels"].as_array().unwrap().len(), 12);
}
