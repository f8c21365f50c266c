use std::path::Path;
use std::process::{Command, Output};

fn smolflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smolflow")).args(args).env("RUST_LOG", "warn").output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("run.toml");
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

const SMALL: &str = "[grid]\nnx = 16\nny = 16\nnm = 16\n\n[time]\ndt = 5e-3\nt_end = 0.05\n\n[initial]\nvelocity = \"taylor-green\"\ndensity = \"anisotropic\"\n";

#[test]
fn check_reports_every_bad_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[grid]\nnx = 100\n\n[monitor]\nsigma = 0.9\nbeta = 0.2\n\n[time]\ndt = -1.0\n");
    let out = smolflow(&["check", &cfg]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    for field in ["grid.nx", "monitor.sigma", "time.dt"] {
        assert!(err.contains(field), "missing {field} in: {err}");
    }
}

#[test]
fn check_accepts_minimal_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let out = smolflow(&["check", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[grid]\nnz = 4\n");
    assert!(!smolflow(&["check", &cfg]).status.success());
}

#[test]
fn identity_suite_passes() {
    let out = smolflow(&["identity-suite", "--seed", "3"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{text}");
    assert!(text.contains("PASS") && !text.contains("FAIL"));
}

#[test]
fn run_then_analyze_and_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let body = format!("{SMALL}\n[output]\ndir = \"{}\"\n", out_dir.display());
    let cfg = write_config(dir.path(), &body);
    let run = smolflow(&["run", &cfg]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let report = std::fs::read_to_string(out_dir.join("report.txt")).unwrap();
    assert_eq!(String::from_utf8_lossy(&run.stdout), report);

    let diag = out_dir.join("diagnostics.csv");
    let analyze = smolflow(&["analyze", diag.to_str().unwrap(), "--sigma", "0.4", "--beta", "0.2", "--lambda", "10"]);
    assert!(analyze.status.success());
    assert_eq!(String::from_utf8_lossy(&analyze.stdout), report);

    let snap = out_dir.join("final.snap");
    let dump = dir.path().join("dump.txt");
    let spec = smolflow(&["spectrum", snap.to_str().unwrap(), "--config", &cfg, "--dump", dump.to_str().unwrap()]);
    assert!(spec.status.success(), "{}", String::from_utf8_lossy(&spec.stderr));
    let text = String::from_utf8_lossy(&spec.stdout);
    assert!(text.contains("q,dv,dgv,sgv,nq"));
    assert!(std::fs::metadata(&dump).unwrap().len() > 0);
}

#[test]
fn missing_files_fail_cleanly() {
    assert!(!smolflow(&["run", "/nonexistent/run.toml"]).status.success());
    assert!(!smolflow(&["spectrum", "/nonexistent/final.snap"]).status.success());
}
