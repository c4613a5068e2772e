//! Exit codes and output files of the command line.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SWEEP: &str = r#"
name = "rf-map"
output_dir = "out"
observables = ["n", "g2", "i2"]

[system]
system = "rf"
delta_s = 0.0
omega_s = 1e-3
gamma_s = 1.0

[[axes]]
param = "delta_s"
min = -2.0
max = 2.0
count = 21
"#;

fn blockade(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_blockade"));
    cmd.args(args).env_remove("BLOCKADE_THREADS");
    if let Some(t) = threads {
        cmd.env("BLOCKADE_THREADS", t);
    }
    cmd.output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.toml");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn sweep_writes_csv_and_sidecar_next_to_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SWEEP);
    let out = blockade(&["sweep", &cfg], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("out/rf-map.csv")).unwrap();
    assert_eq!(csv.lines().count(), 22);
    assert!(csv.starts_with("delta_s,n,g2,i2,status,detail\n"));
    assert!(dir.path().join("out/rf-map.meta.json").exists());
}

#[test]
fn output_is_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SWEEP);
    let target = dir.path().join("out");
    let mut files = Vec::new();
    for threads in ["1", "3"] {
        let out = blockade(&["sweep", &cfg], Some(threads));
        assert_eq!(out.status.code(), Some(0));
        files.push((fs::read(target.join("rf-map.csv")).unwrap(), fs::read(target.join("rf-map.meta.json")).unwrap()));
        fs::remove_dir_all(&target).unwrap();
    }
    assert!(files[0] == files[1], "outputs differ between thread counts");
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), &SWEEP.replace("count = 21", "count = 1"));
    let out = blockade(&["sweep", &bad], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("count >= 2"));

    let missing = dir.path().join("missing.toml");
    assert_eq!(blockade(&["sweep", missing.to_str().unwrap()], None).status.code(), Some(2));

    let cfg = write_config(dir.path(), SWEEP);
    assert_eq!(blockade(&["sweep", &cfg], Some("many")).status.code(), Some(2));
    assert_eq!(blockade(&["features", &cfg], None).status.code(), Some(2));
    assert_eq!(blockade(&["expand", &cfg], None).status.code(), Some(2));
    assert_eq!(blockade(&["verify", "everything"], None).status.code(), Some(2));
    assert_eq!(blockade(&["verify", "identities", "--tol", "-1"], None).status.code(), Some(2));
}

#[test]
fn verify_reports_json_and_exit_status() {
    let out = blockade(&["verify", "identities", "--seed", "5"], None);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], true);
    assert!(!report["checks"].as_array().unwrap().is_empty());

    // a tolerance below the rounding floor cannot be met
    let out = blockade(&["verify", "oracles", "--tol", "1e-300"], None);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], false);
}

#[test]
fn features_and_expand_write_suffixed_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"
name = "jc"
output_dir = "."

[system]
system = "jc"
delta_a = 0.0
delta_s = 0.0
g = 1.0
omega_a = 1e-3
chi = 0.0
phi = 0.0
gamma_a = 0.1
gamma_s = 0.01

[window]
omega_a = [-2.0, 2.0]
omega_l = [-2.0, 2.0]
omega_matter = 0.0
samples = 11

[expand]
observable = "population"
field = { kind = "mode", mode = "cavity" }
powers = [2, 4]
drives = [0.001, 0.002, 0.003, 0.004]
"#,
    );
    let out = blockade(&["features", &cfg], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("jc.features.csv")).unwrap();
    assert!(csv.starts_with("curve,kind,label,exact,omega_a,omega_l\n"));
    assert!(csv.contains(",UB,"));
    assert!(dir.path().join("jc.features.meta.json").exists());

    let out = blockade(&["expand", &cfg], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("jc.expand.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(dir.path().join("jc.expand.meta.json").exists());
}
