use std::path::Path;
use std::process::{Command, Output};

fn pdwg(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdwg"))
        .args(args)
        .arg("--output")
        .arg(out)
        .env_remove("PDWG_OUTPUT_DIR")
        .output()
        .expect("failed to run pdwg")
}

fn read(path: impl AsRef<Path>) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn converge_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = pdwg(&["converge", "--problem", "sinsin", "--case", "case1", "--n-list", "1,2,4"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir.path().join("convergence.csv"));
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,h,h2,l1,l2,h1,linf,w11,lambda0h,ord_h2,ord_l1,ord_l2,ord_h1,ord_linf,ord_w11"
    );
    assert_eq!(lines.count(), 3);
    assert!(dir.path().join("convergence.md").exists());
    let cfg: serde_json::Value = serde_json::from_str(&read(dir.path().join("config.json"))).unwrap();
    assert_eq!(cfg["command"], "converge");
    assert_eq!(cfg["seed"], 42);
}

#[test]
fn solve_writes_fields_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = pdwg(&["solve", "--problem", "quad", "--n", "2"], dir.path());
    assert!(out.status.success());
    let errors: serde_json::Value = serde_json::from_str(&read(dir.path().join("errors.json"))).unwrap();
    assert!(errors["errors"]["l2"].as_f64().unwrap() < 1e-9);
    // 5x5 P2 grid of nodes plus header
    assert_eq!(read(dir.path().join("solution_nodes.csv")).lines().count(), 26);
    assert_eq!(read(dir.path().join("solution_lambda.csv")).lines().count(), 9);
}

#[test]
fn noise_writes_one_snapshot_per_amplitude() {
    let dir = tempfile::tempdir().unwrap();
    let out = pdwg(&["noise", "--problem", "coscos", "--case", "figures", "--n", "4"], dir.path());
    assert!(out.status.success());
    for k in 0..4 {
        assert!(dir.path().join(format!("noise_{k}_nodes.csv")).exists());
        assert!(dir.path().join(format!("noise_{k}_lambda.csv")).exists());
    }
    assert_eq!(read(dir.path().join("noise_summary.csv")).lines().count(), 5);
}

#[test]
fn verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = pdwg(&["verify"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(!String::from_utf8_lossy(&out.stdout).contains("FAIL"));
    assert!(dir.path().join("verify.json").exists());
}

#[test]
fn bad_input_exits_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(pdwg(&["solve", "--problem", "cubic"], dir.path()).status.code(), Some(2));
    assert_eq!(pdwg(&["solve", "--case", "case9"], dir.path()).status.code(), Some(2));
    assert_eq!(pdwg(&["converge", "--n-list", "4,2"], dir.path()).status.code(), Some(2));
    assert_eq!(pdwg(&["noise", "--amplitudes", "0.1"], dir.path()).status.code(), Some(2));
    assert_eq!(pdwg(&["solve", "--n", "-3"], dir.path()).status.code(), Some(2));
}

#[test]
fn config_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.json");
    std::fs::write(&cfg_path, r#"{"problem": "bubble", "case": "case2", "n_list": [2, 4]}"#).unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(pdwg(&["converge", "--config", cfg_path.to_str().unwrap()], &a).status.success());
    assert!(pdwg(&["converge", "--problem", "bubble", "--case", "case2", "--n-list", "2,4"], &b).status.success());
    assert_eq!(read(a.join("convergence.csv")), read(b.join("convergence.csv")));

    // flags override the file
    let c = dir.path().join("c");
    let out = pdwg(&["converge", "--config", cfg_path.to_str().unwrap(), "--problem", "quad"], &c);
    assert!(out.status.success());
    let cfg: serde_json::Value = serde_json::from_str(&read(c.join("config.json"))).unwrap();
    assert_eq!(cfg["problem"], "quad");
    assert_eq!(cfg["case"], "case2");
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.json");
    std::fs::write(&cfg_path, r#"{"problme": "quad"}"#).unwrap();
    let out = pdwg(&["solve", "--config", cfg_path.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_pdwg"))
        .args(["solve", "--problem", "quad", "--n", "1"])
        .env("PDWG_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("errors.json").exists());
}
