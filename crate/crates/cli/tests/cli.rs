//! End-to-end checks of the binary's exit-code contract and output shape.

use std::path::Path;
use std::process::{Command, Output};

const GOOD: &str = r#"
[cavity]
length = 1.0
n_modes = 50

[interaction]
x1 = 0.25
x2 = 0.75
delta_tau = 3.0
duration = 2.1

[detector]
energy_gap = 3.141592653589793
coupling = 0.001
"#;

fn run(args: &[&str], cfg: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cavity-switch"))
        .args(args)
        .arg("--config")
        .arg(cfg)
        .output()
        .unwrap()
}

fn write_cfg(dir: &tempfile::TempDir, body: &str) -> std::path::PathBuf {
    let p = dir.path().join("run.toml");
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn overlap_reports_expected_keys() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["overlap"], &write_cfg(&dir, GOOD));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for key in ["abs_overlap", "overlap_phase", "norm_per_coupling", "separation"] {
        assert!(text.contains(key), "missing {key} in:\n{text}");
    }
}

#[test]
fn missing_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["overlap"], &dir.path().join("nope.toml"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_sign_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(&dir, &format!("{GOOD}\n[postselect]\nsign = \"sideways\"\n"));
    let out = run(&["bell"], &cfg);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_physics_is_a_usage_error() {
    // window longer than the offset: the windows would overlap
    let cfg_body = GOOD.replace("duration = 2.1", "duration = 4.0");
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["overlap"], &write_cfg(&dir, &cfg_body));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn degenerate_point_is_a_numeric_error() {
    // both detectors on the wall: every retained amplitude vanishes
    let cfg_body = GOOD.replace("x1 = 0.25", "x1 = 0.0").replace("x2 = 0.75", "x2 = 0.0");
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["overlap"], &write_cfg(&dir, &cfg_body));
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn modes_override_is_applied() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(&dir, GOOD);
    let out = run(&["overlap", "--modes", "7"], &cfg);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("n_modes_used = 7"), "override not applied:\n{text}");
}

#[test]
fn coincident_positions_warn() {
    let cfg_body = GOOD.replace("x1 = 0.25", "x1 = 0.75");
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["overlap"], &write_cfg(&dir, &cfg_body));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# warning"), "no warning line in:\n{text}");
}

#[test]
fn empty_sweep_yields_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(&dir, &format!("{GOOD}\n[sweep]\n"));
    let out_path = dir.path().join("out.csv");
    let out = Command::new(env!("CARGO_BIN_EXE_cavity-switch"))
        .args(["sweep", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(text.lines().count(), 1, "expected header only:\n{text}");
}
