use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dilute1d"))
        .args(args)
        .env_remove("DILUTE1D_PROFILE")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn scatter_double_delta_even() {
    let dd = fixture("dd.json");
    let v = json(&run(&["scatter", "--input", dd.to_str().unwrap(), "--parity", "even"]));
    assert!((v["a_e"].as_f64().unwrap() + 0.4).abs() < 1e-8);
    assert_eq!(v["schema"], "dilute1d/1");
    assert!(v.get("a_o").is_none());
    let both = json(&run(&["scatter", "--input", dd.to_str().unwrap()]));
    let a_o = both["a_o"].as_f64().unwrap();
    assert!((a_o - (0.1 - 0.1 / 1.2)).abs() < 1e-8);
}

#[test]
fn chain_inside_sandwich() {
    let v = json(&run(&["chain", "--J", "0.5", "--N", "12", "--coupling", "ls"]));
    assert_eq!(v["sandwich"]["inside"], true);
    let eps = v["epsilon"].as_f64().unwrap();
    assert!((eps - (1.0 - std::f64::consts::LN_2)).abs() <= 1.0 / 12.0);
    let f = json(&run(&["chain", "--input", fixture("chain_ls.json").to_str().unwrap()]));
    assert_eq!(f["N"], 8);
}

#[test]
fn chain_llh_needs_couplings() {
    assert_eq!(run(&["chain", "--coupling", "llh"]).status.code(), Some(2));
    let v = json(&run(&["chain", "--N", "8", "--coupling", "llh", "--c", "1", "--c-prime", "1"]));
    assert!((v["epsilon"].as_f64().unwrap() + 2.0).abs() < 1e-10);
}

#[test]
fn byte_identical_output() {
    let args = ["chain", "--J", "1", "--N", "6", "--seed", "9"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let args = ["freefermi", "--N", "4", "--format", "json", "--samples", "500", "--seed", "3"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["scatter", "--input", "/nonexistent.json"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"R0": 0.1, "atoms": [], "colour": 1}"#).unwrap();
    assert_eq!(run(&["scatter", "--input", bad.to_str().unwrap()]).status.code(), Some(2));
    std::fs::write(&bad, r#"{"schema": "dilute1d/0", "R0": 0.1}"#).unwrap();
    assert_eq!(run(&["scatter", "--input", bad.to_str().unwrap()]).status.code(), Some(2));
    let stuck = run(&["chain", "--N", "10", "--tol", "lanczos.max_iter=2", "--tol", "lanczos.tol=1e-14"]);
    assert_eq!(stuck.status.code(), Some(3));
    assert_eq!(run(&["chain", "--tol", "nonsense=1"]).status.code(), Some(2));
    assert_eq!(run(&["chain", "--N", "40"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    let profile = Command::new(env!("CARGO_BIN_EXE_dilute1d"))
        .args(["chain", "--N", "4"])
        .env("DILUTE1D_PROFILE", "bogus")
        .output()
        .unwrap();
    assert_eq!(profile.status.code(), Some(2));
}

#[test]
fn freefermi_csv_table() {
    let out = run(&["freefermi", "--N", "6", "--L", "6", "--points", "11"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rows.headers().unwrap().len(), 6);
    let records: Vec<_> = rows.records().map(|r| r.unwrap()).collect();
    assert_eq!(records.len(), 11);
    for r in &records {
        let ratio: f64 = r[5].parse().unwrap();
        assert!((0.0..=1.0).contains(&ratio));
    }
}

#[test]
fn expand_modes() {
    let v = json(&run(&["expand", "--N", "10", "--L", "10", "--a-e", "-0.02", "--a-o", "0"]));
    let expected = 2.0 * std::f64::consts::LN_2 * -0.02;
    assert!((v["correction"].as_f64().unwrap() - expected).abs() < 1e-12);
    let inf = json(&run(&["expand", "--a-e", "-inf", "--a-o", "0"]));
    assert_eq!(inf["status"], "invalid: infinite error term");
    assert_eq!(run(&["expand", "--a-e", "0.1", "--a-o", "0"]).status.code(), Some(2));

    let out = run(&["expand", "--mode", "llh-grid", "--format", "csv"]);
    assert!(out.status.success());
    let mut rows = csv::Reader::from_reader(&out.stdout[..]);
    let margins: Vec<f64> = rows.records().map(|r| r.unwrap()[4].parse().unwrap()).collect();
    assert_eq!(margins.len(), 400);
    assert!(margins.iter().all(|m| *m > 0.0));

    let hc = json(&run(&["expand", "--mode", "hard-core", "--N", "10", "--L", "1000", "--a", "1"]));
    assert_eq!(hc["within_band"], true);
}

#[test]
fn bethe_summary() {
    let v = json(&run(&["bethe-yg", "--rho", "1", "--c", "100", "--summary"]));
    assert!((v["m_density"].as_f64().unwrap() - 0.5).abs() < 1e-4);
    assert_eq!(v["f"].as_array().map(Vec::len), Some(0));
    assert!(v.get("sigma").is_none());
    let e = v["e_over_rho3"].as_f64().unwrap();
    let first = std::f64::consts::PI.powi(2) / 3.0 * (1.0 - 4.0 * std::f64::consts::LN_2 * 0.01);
    assert!((e - first).abs() <= 20.0 * 1e-4 * std::f64::consts::PI.powi(2) / 3.0);
}

#[test]
fn verify_clean_checkout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&["verify", "-o", path.to_str().unwrap()]);
    let table = String::from_utf8_lossy(&out.stderr);
    assert_eq!(out.status.code(), Some(0), "{table}");
    assert!(table.lines().filter(|l| l.starts_with("PASS")).count() >= 15);
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(report["criteria"].as_array().unwrap().len() >= 15);
    assert_eq!(report["all_pass"], true);
}

#[test]
fn bethe_input_file() {
    let path = fixture("bethe_yg.json");
    let v = json(&run(&["bethe-yg", "--summary", "--input", path.to_str().unwrap()]));
    assert_eq!(v["c"].as_f64(), Some(200.0));
    assert_eq!(run(&["bethe-ll", "--input", path.to_str().unwrap()]).status.code(), Some(2));
}
