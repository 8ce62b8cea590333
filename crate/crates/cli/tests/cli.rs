use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn layent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_layent"))
        .args(args)
        .output()
        .expect("run layent")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn uniform_four_json() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "u.json", "[0.25, 0.25, 0.25, 0.25]");
    let o = layent(&["entropy", arg(&f), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["layered"], 2.0);
    assert_eq!(v["shannon"], 2.0);
}

#[test]
fn entropy_csv_values() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "p.csv", "label,prob\na,0.5\nb,0.25\nc,0.25\n");
    let o = layent(&["entropy", arg(&f), "--alpha", "1,inf"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("quantity,alpha,value\n"));
    assert!(out.contains("shannon,,1.5\n"));
    assert!(out.contains("layered,,1.18872187554\n"));
    assert!(out.contains("renyi_layered,inf,1\n"));
}

#[test]
fn malformed_csv_exits_two_with_position() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "bad.csv", "0.5\nabc\n");
    let o = layent(&["entropy", arg(&f)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn invalid_pmf_and_flags_exit_two() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "p.json", "[0.5, 0.4]");
    assert_eq!(layent(&["entropy", arg(&f)]).status.code(), Some(2));
    let ok = write(&dir, "q.json", "[0.5, 0.5]");
    assert_eq!(
        layent(&["entropy", arg(&ok), "--alpha", "-1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        layent(&["entropy", arg(&ok), "--format", "xml"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        layent(&["entropy", "/nonexistent/p.json"]).status.code(),
        Some(2)
    );
    assert_eq!(
        layent(&["simplex-grid", "--resolution", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        layent(&["sfrl", "--curve", "--eta", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(layent(&[]).status.code(), Some(2));
}

#[test]
fn output_file_not_written_on_error() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "p.json", "[0.5, 0.4]");
    let out = dir.path().join("out.csv");
    let o = layent(&["entropy", arg(&f), "--out", arg(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn simplex_grid_rows() {
    let o = layent(&["simplex-grid", "--resolution", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "p1,p2,p3,H,Lambda");
    assert_eq!(lines.len(), 7);
    assert!(lines.contains(&"0.5,0.5,0,1,1"));
    assert!(lines.contains(&"1,0,0,0,0"));
}

#[test]
fn region_is_deterministic_per_seed() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "p.csv", "0.5\n0.3\n0.2\n");
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for out in [&a, &b] {
        let o = layent(&[
            "region",
            arg(&f),
            "--trials",
            "20",
            "--seed",
            "7",
            "--out",
            arg(out),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    let first = fs::read(&a).unwrap();
    assert_eq!(first, fs::read(&b).unwrap());
    let text = String::from_utf8(first).unwrap();
    assert!(text.starts_with("h_cond,h_diff,seed\n"));
    assert_eq!(text.lines().count(), 23);

    let other = layent(&["region", arg(&f), "--trials", "20", "--seed", "8"]);
    assert_ne!(stdout(&other), text);
}

#[test]
fn sfrl_chain_and_curve() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "j.csv", "0.45,0.05\n0.05,0.45\n");
    let o = layent(&["sfrl", arg(&f), "--eta", "loge"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for key in [
        "lambda_K",
        "tail_bound",
        "e_term",
        "I",
        "i_log3",
        "pass",
        "h_bound",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["pass"], true);

    let o = layent(&[
        "sfrl", "--curve", "--i-min", "0", "--i-max", "2", "--points", "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("I,li2021,li2024,loge,eta_opt\n0,3.732,3,3.5220523188,"));
    assert!(out.contains("\n2,"));
}

#[test]
fn verify_exit_codes() {
    let o = layent(&["verify", "core", "--trials", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["suite"], "core");
    assert_eq!(v["failures"].as_array().unwrap().len(), 0);

    let o = layent(&["verify", "core", "--trials", "10", "--tol", "1e-30"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(!v["failures"].as_array().unwrap().is_empty());

    assert_eq!(layent(&["verify", "nope"]).status.code(), Some(2));
    assert_eq!(
        layent(&["verify", "core", "--trials", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        layent(&["verify", "core", "--tol", "-1"]).status.code(),
        Some(2)
    );
}

#[test]
fn verify_all_default_passes_and_is_deterministic() {
    let a = layent(&["verify", "all", "--seed", "42", "--trials", "200"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    let b = layent(&["verify", "all", "--seed", "42", "--trials", "200"]);
    assert_eq!(a.stdout, b.stdout);
}
