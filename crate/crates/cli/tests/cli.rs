use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cubic-lpf"));
    c.env_remove("CUBIC_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cubic-lpf-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn roots_report() {
    let v = json(&["roots", "--poly", "0,0,2", "--p", "31"]);
    assert_eq!(v["roots"], serde_json::json!([11, 24, 27]));
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "roots");
    assert_eq!(v["seed"], 0);
    assert_eq!(v["poly"]["coefficients"], serde_json::json!([0, 0, 2]));
    assert!(v["version"].is_string());
}

#[test]
fn identities_all_true() {
    let v = json(&["identities", "--poly", "0,0,2"]);
    let flags = v["identities"].as_object().unwrap();
    assert_eq!(flags.len(), 5);
    assert!(flags.values().all(|b| b == true));
    assert_eq!(v["polynomials"]["q"], "-1*a1^3+-2*a2^3");
    let g = json(&["identities", "--generic"]);
    assert_eq!(g["all_hold"], true);
}

#[test]
fn lift_and_kalpha() {
    let v = json(&["lift", "--p", "5", "--a", "2", "--k", "2"]);
    assert_eq!(v["lift"], 22);
    let v = json(&["kalpha", "--alpha", "3,1,0", "--n", "22,47,23"]);
    assert_eq!(v["agree"], true);
    assert_eq!(v["k_cofactor"]["k"], 22);
    assert_eq!(v["k_cofactor"]["modulus"], 25);
}

#[test]
fn ideal_rho_zero_and_check() {
    let v = json(&["ideal", "--factors", "31:11,31:24"]);
    assert_eq!(v["rho"], 0);
    assert!(v["k_class"].is_null());
    let v = json(&["ideal", "--factors", "5:2:2,31:11", "--check-upto", "2000"]);
    assert_eq!(v["rho"], 1);
    assert_eq!(v["norm"], 775);
    assert_eq!(v["norm_divisibility"]["first_mismatches"], serde_json::json!([]));
}

#[test]
fn scan_csv_and_thread_independence() {
    let csv = scratch("scan.csv");
    let a = run(&["scan", "--X", "2000", "--c", "0,0.05", "--threads", "1", "--csv", csv.to_str().unwrap()]);
    assert!(a.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("c,count,density"));
    assert_eq!(lines.count(), 2);
    let b = run(&["scan", "--X", "2000", "--c", "0,0.05", "--threads", "4"]);
    assert_eq!(a.stdout, b.stdout);
    let c = bin()
        .args(["scan", "--X", "2000", "--c", "0,0.05"])
        .env("CUBIC_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn seeded_output_is_reproducible() {
    let args = ["units", "--poly", "0,-1,-1", "--samples", "300", "--seed", "9"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], 9);
    assert_eq!(v["units"]["generators"][0], serde_json::json!({"a0": 0, "a1": 1, "a2": 0}));
    let c = run(&["units", "--poly", "0,-1,-1", "--samples", "300", "--seed", "10", "--threads", "2"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn weights_check() {
    let v = json(&["weights", "--D", "1000", "--z", "30", "--check-upto", "20000", "--list"]);
    assert_eq!(v["check"]["holds"], true);
    assert_eq!(v["weights"][0], serde_json::json!([1, 1]));
}

#[test]
fn expsum_commands() {
    let v = json(&["expsum", "sigma", "--alphas", "3,1,0;5,-2,1", "--n", "0"]);
    assert_eq!(v["sigma"]["value"], serde_json::json!([2.0, 0.0]));
    assert_eq!(v["command"], "expsum.sigma");
    let v = json(&["expsum", "psi", "--t", "0.25", "--H", "1000"]);
    assert!(v["residual"].as_f64().unwrap() < 0.01);
    let v = json(&["expsum", "kloos", "--rows", "3", "--seed", "2"]);
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn s0s1_identity() {
    let v = json(&["s0s1", "--X", "5000", "--delta", "0.3", "--floor", "31"]);
    assert_eq!(v["identity_holds"], true);
    assert!(v["terms"].as_array().unwrap().len() > 0);
}

#[test]
fn validation_errors_exit_one() {
    for args in [
        vec!["roots", "--poly", "0,0,1", "--p", "5"],
        vec!["roots", "--p", "4"],
        vec!["frobnicate"],
        vec!["scan", "--X", "10"],
        vec!["scan", "--X", "2000", "--c", "3"],
        vec!["weights", "--D", "1", "--z", "1"],
        vec!["lift", "--p", "5", "--a", "1", "--k", "2"],
        vec!["s0s1", "--X", "50000", "--delta", "0.3"],
        vec!["identities", "--csv", "/dev/null"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn config_file_with_override() {
    let cfg = scratch("run.cfg");
    std::fs::write(&cfg, "# scan settings\npoly = 0,0,2\nX = 1000\nc = 0,0.5\n").unwrap();
    let v = json(&["scan", "--config", cfg.to_str().unwrap()]);
    assert_eq!(v["x"], 1000);
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    let v = json(&["scan", "--config", cfg.to_str().unwrap(), "--X", "1500"]);
    assert_eq!(v["x"], 1500);
    std::fs::write(&cfg, "X = 1000\nbogus = 3\n").unwrap();
    let out = run(&["scan", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("config line 2"));
}

#[test]
fn out_file() {
    let path = scratch("roots.json");
    let out = run(&["roots", "--p", "7", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["p"], 7);
}
