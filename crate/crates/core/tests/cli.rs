use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_meshbound"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn config() -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("configs/nonlinearities.json")
        .display()
        .to_string()
}

#[test]
fn eigen_with_oracle() {
    let v = json(&["eigen", "--mesh", "12x9@0:2,0:1", "--oracle"]);
    let closed = v["lambda1h"].as_f64().unwrap();
    let oracle = v["oracle"]["lambda"].as_f64().unwrap();
    assert!((closed - oracle).abs() <= 1e-10 * closed);
    assert!(closed < v["lambda1"].as_f64().unwrap());
}

#[test]
fn verify_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let v = json(&[
        "--out",
        out,
        "--seed",
        "3",
        "verify",
        "--inequality",
        "hardy",
        "--mesh",
        "16x16",
        "--samples",
        "50",
    ]);
    assert_eq!(v["passed"], Value::Bool(true));
    assert!(dir.path().join("verify.json").exists());
}

#[test]
fn bound1d_cubic() {
    let v = json(&[
        "bound1d",
        "--growth",
        "cubic_plus_one",
        "--K",
        "1",
        "--L",
        "1",
    ]);
    let mbar = v["Mbar"].as_f64().unwrap();
    assert!((mbar - 81.9498).abs() < 1e-3, "{mbar}");
}

#[test]
fn boundnd_square() {
    let v = json(&[
        "boundnd",
        "--domain",
        "0:1,0:1",
        "--p",
        "1.5",
        "--lambda",
        "39.47841760435743",
        "--C1",
        "9114.3938353807",
        "--C2",
        "1",
        "--C3",
        "1",
    ]);
    let mbar = v["mbar"].as_f64().or_else(|| v["Mbar"].as_f64()).unwrap();
    assert!(mbar.is_finite() && mbar > 1e50);
}

#[test]
fn solve_and_sweep_write_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cfg = config();
    let v = json(&[
        "--out",
        out,
        "solve",
        "--config",
        &cfg,
        "--id",
        "power_1.5_plus_one",
        "--mesh",
        "16x16",
    ]);
    assert_eq!(v["result"]["converged"], Value::Bool(true));
    assert!(dir.path().join("solution.csv").exists());

    let v = json(&[
        "--out",
        out,
        "sweep",
        "--config",
        &cfg,
        "--id",
        "cubic_plus_one",
        "--domain",
        "-1:1",
        "--sizes",
        "8,16,32",
    ]);
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert!(csv.starts_with("n,N_1,h_1,u_inf,u_D,residual,M_bar,passed,wall_ms\n"));
    assert!(dir.path().join("sweep.json").exists() && dir.path().join("sweep_plot.csv").exists());
}

#[test]
fn bad_input_fails_cleanly() {
    let out = run(&["eigen", "--mesh", "1x4"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    let out = run(&[
        "solve",
        "--config",
        &config(),
        "--id",
        "missing",
        "--mesh",
        "8x8",
    ]);
    assert!(!out.status.success());
}
