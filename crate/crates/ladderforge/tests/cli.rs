use std::path::Path;
use std::process::{Command, Output};

fn ladderforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ladderforge"))
        .args(args)
        .env("LADDERFORGE_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn verify_algebra_prints_passing_report() {
    let o = ladderforge(&["verify-algebra", "--cutoff", "8,8"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "pass");
    assert_eq!(v["scenario"], "verify-algebra");
    assert!(v["checks"].as_array().unwrap().len() >= 20);
}

#[test]
fn exit_codes() {
    let refused = ladderforge(&["solve-ladder", "--beta0", "7", "--beta-plus", "0.25", "--beta3", "0.5"]);
    assert_eq!(code(&refused), 2);
    let v: serde_json::Value = serde_json::from_slice(&refused.stdout).unwrap();
    assert_eq!(v["status"], "refused");
    assert!(v["message"].as_str().unwrap().contains("NoLadderExists"));

    assert_eq!(code(&ladderforge(&["verify-algebra", "--cutoff", "3"])), 65);
    assert_eq!(code(&ladderforge(&["solve-ladder"])), 64);
    assert_eq!(code(&ladderforge(&["bogus"])), 64);
    assert_eq!(code(&ladderforge(&["verify-algebra", "--config", "/nonexistent/cfg.json"])), 64);
    assert_eq!(code(&ladderforge(&["chen", "--p", "2", "--q", "4"])), 2);
    assert_eq!(code(&ladderforge(&["--version"])), 0);
}

#[test]
fn config_file_and_csv_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scenario.json");
    std::fs::write(
        &cfg,
        r#"{"scenario": "eigenstate", "params": {"beta0": 2.0, "beta_plus": [0.0, 0.0], "beta3": 0.0},
            "request": {"tag": "IsotropicB0eq2", "lambda": "0.3+0.1j", "kappa": 1, "branch": "kappa"},
            "cutoff": [16, 16]}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = ladderforge(&["eigenstate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("eigenstate.json")).unwrap()).unwrap();
    assert_eq!(report["status"], "pass");
    let csv = std::fs::read_to_string(out.join("eigenstate.csv")).unwrap();
    assert!(csv.starts_with("n1,n2,re,im,probability"));
    assert_eq!(csv.lines().count(), 1 + 17 * 17);

    // wrong scenario in the config is a config error
    let o = ladderforge(&["reduce", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 64);
}

fn sweep(dir: &Path, threads: &str) -> Vec<u8> {
    let o = Command::new(env!("CARGO_BIN_EXE_ladderforge"))
        .args(["catalogue-sweep", "--random", "2", "--seed", "11", "--out", dir.to_str().unwrap()])
        .env("LADDERFORGE_THREADS", threads)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::read(dir.join("catalogue-sweep.json")).unwrap()
}

#[test]
fn catalogue_sweep_is_deterministic() {
    let d = tempfile::tempdir().unwrap();
    let a = sweep(&d.path().join("a"), "1");
    let b = sweep(&d.path().join("b"), "4");
    assert!(a == b, "reports differ between runs");
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["status"], "pass");
}
