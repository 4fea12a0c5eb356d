use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn multipole(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multipole")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.toml");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn malformed_config_exits_with_two_and_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[fock]\ngrid_size = 63\n");
    let out = multipole(&["--config", &cfg, "fock"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("fock.grid_size"), "{err}");
}

#[test]
fn unknown_key_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[tolerances]\nagreemnt = 1e-6\n");
    let out = multipole(&["--config", &cfg, "coeffs"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("agreemnt"));
}

#[test]
fn negative_tolerance_is_a_config_error() {
    let out = multipole(&["--tol", "-1", "coeffs"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tolerances.agreement"));
}

#[test]
fn missing_config_file_is_a_config_error() {
    let out = multipole(&["--config", "/nonexistent/run.toml", "coeffs"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn shifted_gaussians_first_order() {
    let out = multipole(&["expansion", "--theorem", "fullline", "--order", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("fullline_n1 slope 4.0"), "{text}");
    assert!(!text.contains("fullline_n0"));
}

#[test]
fn unmatched_selection_is_a_config_error() {
    let out = multipole(&["expansion", "--theorem", "simplex", "--order", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failing_tolerance_exits_with_one() {
    let out = multipole(&["--tol", "1e-30", "coeffs"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn dumped_config_runs_unchanged() {
    let out = multipole(&["--dump-config", "all"]);
    assert_eq!(out.status.code(), Some(0));
    let dumped = String::from_utf8(out.stdout).unwrap();
    let shipped = fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/default.toml")).unwrap();
    assert_eq!(dumped, shipped);
}

#[test]
fn json_outputs_use_fixed_float_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = multipole(&["--json", "--out", dir.path().to_str().unwrap(), "coeffs"]);
    assert_eq!(out.status.code(), Some(0));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["status"], "pass");
    assert_eq!(summary["exit_code"], 0);
    let text = fs::read_to_string(dir.path().join("coeffs.json")).unwrap();
    assert!(text.contains("\"omega0\": 2.0000000000000000e+0"), "{text}");
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let g0 = &v["coefficients"]["gamma0"];
    let re: f64 = g0["re"].to_string().parse().unwrap();
    assert!((re - std::f64::consts::PI).abs() < 1e-8);
}
