use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn entangle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entangle"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = entangle(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("report is json")
}

fn num(v: &Value, key: &str) -> f64 {
    v["results"][key].as_f64().unwrap_or_else(|| panic!("missing {key} in {v}"))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

const BELL: &str = r#"{"dim_a":2,"dim_b":2,"kind":"pure",
  "amps":[[[0.7071067811865476,0],[0,0]],[[0,0],[0.7071067811865476,0]]]}"#;
const PRODUCT: &str = r#"{"dim_a":2,"dim_b":2,"kind":"pure",
  "amps":[[[0.7071067811865476,0],[0.7071067811865476,0]],[[0,0],[0,0]]]}"#;
const PROJ_B: &str = r#"{"side":"B","dim_a":2,"dim_b":2,
  "kraus":[[[[1,0],[0,0]],[[0,0],[0,0]]], [[[0,0],[0,0]],[[0,0],[1,0]]]]}"#;

#[test]
fn measure_bell_and_product_files() {
    let dir = tempfile::tempdir().unwrap();
    let bell = write(dir.path(), "bell.json", BELL);
    let r = report(&["--seed", "1", "measure", &bell]);
    for key in ["c_purity", "c_minors", "c_schmidt", "phc", "tangle"] {
        assert!((num(&r, key) - 1.0).abs() < 1e-12, "{key}");
    }
    assert_eq!(r["inputs"]["seed"], 1);

    let prod = write(dir.path(), "prod.json", PRODUCT);
    let r = report(&["--seed", "1", "measure", &prod]);
    for key in ["c_minors", "c_schmidt", "phc", "tangle"] {
        assert!(num(&r, key).abs() < 1e-12, "{key}");
    }
    assert!(num(&r, "c_purity").abs() < 1e-7);
    assert_eq!(r["results"]["separable"], true);
}

#[test]
fn measure_werner_file_matches_wootters() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.json").display().to_string();
    let out = entangle(&["--seed", "7", "--quiet", "family", "--family", "werner:p=0.8", "--out", &path]);
    assert!(out.stdout.is_empty());
    let r = report(&["--seed", "7", "measure", &path, "--functional", "concurrence", "--restarts", "64"]);
    let roof = r["results"]["roof"]["value"].as_f64().unwrap();
    assert_eq!(r["results"]["roof"]["label"], "upper bound");
    let exact = num(&r, "wootters_exact");
    assert!((exact - 0.7).abs() < 1e-12);
    assert!(roof >= exact - 1e-9 && roof <= exact + 5e-3, "{roof}");
    let chain = &r["results"]["bound_chain"];
    assert!(chain["c_sq"].as_f64().unwrap() <= chain["tangle"].as_f64().unwrap() + 1e-9);
}

#[test]
fn schmidt_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let r = report(&["--seed", "1", "schmidt", &write(dir.path(), "bell.json", BELL)]);
    let coeffs: Vec<f64> = serde_json::from_value(r["results"]["coeffs"].clone()).unwrap();
    assert_eq!(r["results"]["rank"], 2);
    assert!(coeffs.iter().all(|c| (c - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12));
    let r = report(&["--seed", "1", "schmidt", &write(dir.path(), "prod.json", PRODUCT)]);
    assert_eq!(r["results"]["rank"], 1);

    let r = report(&["--seed", "1", "schmidt", "--family", "two_mode_squeezed:r=0.5,d=8"]);
    let coeffs: Vec<f64> = serde_json::from_value(r["results"]["coeffs"].clone()).unwrap();
    let t = 0.5f64.tanh();
    let norm: f64 = (0..8).map(|k| t.powi(2 * k)).sum::<f64>().sqrt();
    for (k, c) in coeffs.iter().enumerate() {
        assert!((c - t.powi(k as i32) / norm).abs() < 1e-10, "k={k}");
    }
}

#[test]
fn schmidt_rejects_mixed_states() {
    let out = entangle(&["--seed", "1", "schmidt", "--family", "werner:p=0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scan_outputs_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("scan.csv");
    let csv_s = csv.display().to_string();
    let r = report(&["scan", "--family", "two_mode_squeezed:r=0.5", "--dims", "2,4,8,16", "--csv", &csv_s]);
    assert_eq!(r["results"]["certificate_holds"], true);
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "dim,concurrence,trace_gap,certified_bound,analytic_limit");
    assert_eq!(lines.len(), 5);

    for (fam, dims) in [("product", "2,4"), ("two_mode_squeezed:r=0", "2,8")] {
        let r = report(&["--seed", "3", "scan", "--family", fam, "--dims", dims]);
        let vals: Vec<f64> = serde_json::from_value(r["results"]["concurrence"].clone()).unwrap();
        assert!(vals.iter().all(|v| v.abs() < 1e-7), "{fam}: {vals:?}");
    }
    let out = entangle(&["scan", "--family", "werner:p=0.5", "--dims", "2,4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn audit_examples() {
    let dir = tempfile::tempdir().unwrap();
    let bell = write(dir.path(), "bell.json", BELL);
    let chan = write(dir.path(), "proj.json", PROJ_B);
    let r = report(&["--seed", "1", "audit", &bell, "--channel", &chan, "--mode", "wootters"]);
    assert!((num(&r, "min_margin") - 1.0).abs() < 1e-9);
    assert_eq!(r["results"]["violations"], 0);

    let h = std::f64::consts::FRAC_1_SQRT_2;
    let hadamard = format!(
        r#"{{"side":"A","dim_a":2,"dim_b":2,"kraus":[[[[{h},0],[{h},0]],[[{h},0],[-{h},0]]]]}}"#
    );
    let unitary = write(dir.path(), "u.json", &hadamard);
    let r = report(&["--seed", "4", "audit", "--family", "rank_k_random:k=2", "--channel", &unitary, "--trials", "5"]);
    assert!(num(&r, "min_margin").abs() < 1e-9 && num(&r, "mean_margin").abs() < 1e-9);

    let r = report(&["--seed", "11", "audit", "--family", "rank_k_random:k=2", "--trials", "200"]);
    assert_eq!(r["results"]["violations"], 0);
    assert!(num(&r, "min_margin") >= -1e-9);
}

#[test]
fn audit_mode_errors() {
    let out = entangle(&["--seed", "1", "audit", "--family", "isotropic:p=0.5,d=3", "--mode", "wootters"]);
    assert_eq!(out.status.code(), Some(2));
    let out = entangle(&["--seed", "1", "audit", "--family", "bell", "--mode", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn parse_failures_exit_three_with_field() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"dim_a":2,"kind":"pure","amps":[]}"#);
    let out = entangle(&["measure", &bad]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dim_b"));
    let out = entangle(&["measure", "/nonexistent/state.json"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn validation_failures_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "trace.json",
        r#"{"dim_a":1,"dim_b":2,"kind":"mixed","rho":[[0.5,0],[0,0],[0,0],[0.6,0]]}"#,
    );
    let out = entangle(&["measure", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("trace"));
}

#[test]
fn round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    for spec in ["two_mode_squeezed:r=0.7,d=6", "product:da=3,db=2", "rank_k_random:da=2,db=3,k=2"] {
        let path = dir.path().join("s.json").display().to_string();
        assert!(entangle(&["--seed", "5", "--quiet", "family", "--family", spec, "--out", &path]).status.success());
        let from_file = report(&["--seed", "5", "roof", &path, "--restarts", "4"]);
        let direct = report(&["--seed", "5", "roof", "--family", spec, "--restarts", "4"]);
        let a = from_file["results"]["roof"]["value"].as_f64().unwrap();
        let b = direct["results"]["roof"]["value"].as_f64().unwrap();
        assert!((a - b).abs() < 1e-12, "{spec}: {a} vs {b}");
    }
}

#[test]
fn identical_seeds_give_identical_results() {
    let args = ["--seed", "21", "roof", "--family", "rank_k_random:k=3", "--restarts", "6"];
    let a = report(&args);
    let b = report(&args);
    assert_eq!(a["results"], b["results"]);
}

#[test]
fn missing_seed_is_generated_and_echoed() {
    let r = report(&["measure", "--family", "bell"]);
    assert!(r["inputs"]["seed"].is_u64());
    assert!(!r["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn json_out_and_phc_command() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let out_s = out.display().to_string();
    let r = report(&["--seed", "2", "--json-out", &out_s, "phc", "--family", "bell"]);
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(saved["results"], r["results"]);
    assert!((num(&r, "hs_distance") - 1.0).abs() < 1e-12);
    assert_eq!(r["results"]["is_phc_invariant"], false);

    let r = report(&["--seed", "2", "phc", "--family", "werner:p=0.8", "--restarts", "8"]);
    assert_eq!(r["results"]["phc_roof"]["label"], "upper bound");
}

#[test]
fn as_truncation_reports_boundary_weight() {
    let r = report(&["--seed", "1", "measure", "--family", "two_mode_squeezed:r=0.5,d=4", "--as-truncation"]);
    let t = 0.5f64.tanh();
    let w: f64 = (0..4).map(|k| t.powi(2 * k)).sum();
    assert!((num(&r, "boundary_weight") - t.powi(6) / w).abs() < 1e-12);
}
