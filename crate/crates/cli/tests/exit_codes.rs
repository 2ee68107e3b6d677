use std::path::PathBuf;
use std::process::Command;

fn siegel(args: &[&str]) -> (i32, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_siegel")).args(args).output().unwrap();
    (o.status.code().unwrap(), String::from_utf8_lossy(&o.stdout).into_owned())
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("exit_codes");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn unsupported_degree() {
    assert_eq!(siegel(&["hecke-verify", "--degree", "4"]).0, 2);
}

#[test]
fn hecke_verify_passes() {
    let (code, out) = siegel(&["hecke-verify", "--degree", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("PASS") && !out.contains("FAIL"));
}

#[test]
fn kummer_rejects_bad_local_data() {
    let lp = scratch("lp.json", r#"{"2": [0, 1, -3], "3": [0, 2, 0, 1]}"#);
    // q = p among the local primes
    assert_eq!(siegel(&["kummer", "--p", "3", "--in", lp.to_str().unwrap()]).0, 5);
    let bad = scratch("bad.json", r#"{"2": [1, 1]}"#);
    assert_eq!(siegel(&["kummer", "--p", "5", "--in", bad.to_str().unwrap()]).0, 5);
    let (code, out) = siegel(&["kummer", "--p", "5", "--in", lp.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("PASS"));
}

#[test]
fn missing_input_file() {
    assert_eq!(siegel(&["interpolate", "--in", "/nonexistent/job.json"]).0, 5);
}

#[test]
fn pstab_level_divisible_by_p() {
    // generated data has level 4
    assert_eq!(siegel(&["pstab", "--p", "2", "--bound", "5"]).0, 3);
}
