//! End-to-end runs of the command-line driver.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ergodic-oprl"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn zeros_run_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let res = cli(&["zeros", "--model", "amo", "--lambda", "0.5", "--n", "500", "--x0", "0.3", "--seed", "7", "--out", path_arg(out)]);
        assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    }
    let first = fs::read(a.join("zeros.csv")).unwrap();
    assert_eq!(first, fs::read(b.join("zeros.csv")).unwrap());
    let text = String::from_utf8(first).unwrap();
    assert!(text.starts_with("n,x0,j,x_j,x_next,scaled_spacing\n"));
    assert!(!text.contains('\r'));
}

#[test]
fn manifest_hashes_every_output() {
    let dir = tempfile::tempdir().unwrap();
    let res = cli(&["dos", "--n", "400", "--x0", "-0.5,0,0.5", "--out", path_arg(dir.path())]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["experiment"], "dos");
    assert_eq!(manifest["exit_code"], 0);
    let files = manifest["files"].as_array().unwrap();
    assert!(!files.is_empty());
    let csvs = fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "csv"))
        .count();
    assert_eq!(files.len(), csvs);
    for f in files {
        let bytes = fs::read(dir.path().join(f["path"].as_str().unwrap())).unwrap();
        assert_eq!(f["sha256"].as_str().unwrap(), hex::encode(Sha256::digest(&bytes)));
        assert_eq!(f["bytes"].as_u64().unwrap() as usize, bytes.len());
    }
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.json");
    fs::write(&cfg, r#"{"model": {"name": "free"}, "energies": [], "n": [100]}"#).unwrap();
    let res = cli(&["kernel", "--config", path_arg(&cfg), "--out", path_arg(&dir.path().join("o"))]);
    assert_eq!(code(&res), 1);

    let res = cli(&["zeros", "--n", "-5", "--out", path_arg(&dir.path().join("o"))]);
    assert_eq!(code(&res), 1);

    let res = cli(&["zeros", "--no-such-flag"]);
    assert_eq!(code(&res), 1);

    let res = cli(&["zeros", "--model", "anderson", "--out", path_arg(&dir.path().join("o"))]);
    assert_eq!(code(&res), 1, "anderson without a seed");

    let res = cli(&["wave", "--config", path_arg(&dir.path().join("missing.json"))]);
    assert_eq!(code(&res), 1);
}

#[test]
fn bound_violations_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("fault.json");
    fs::write(
        &cfg,
        r#"{"model": {"name": "free"}, "energies": [0.0, 1.0], "n": [500], "bound_exponent_scale": 0.001}"#,
    )
    .unwrap();
    let res = cli(&["bounds", "--config", path_arg(&cfg), "--out", path_arg(dir.path())]);
    assert_eq!(code(&res), 2, "{}", String::from_utf8_lossy(&res.stderr));
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["exit_code"], 2);
    assert!(manifest["violations"].as_u64().unwrap() > 0);
}

#[test]
fn unperturbed_bounds_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let res = cli(&["bounds", "--model", "amo", "--lambda", "0.5", "--n", "300", "--x0", "0.1", "--out", path_arg(dir.path())]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
}

#[test]
fn strong_coupling_warns_without_failing() {
    let dir = tempfile::tempdir().unwrap();
    let res = cli(&["universality", "--model", "amo", "--lambda", "1.2", "--n", "200", "--x0", "0", "--out", path_arg(dir.path())]);
    assert_eq!(code(&res), 0);
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("warning"), "{err}");
}
