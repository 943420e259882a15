use std::process::Command;

use hh_harness::{read_rows, OutputFormat};

fn hh() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hh"))
}

#[test]
fn gen_then_run_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let stream = dir.path().join("spike.hhs");
    let status = hh()
        .args([
            "gen",
            "--workload",
            "spike",
            "--n",
            "4096",
            "--m",
            "2000",
            "--f-star",
            "800",
            "--seed",
            "3",
        ])
        .arg("--output")
        .arg(&stream)
        .status()
        .unwrap();
    assert!(status.success());

    let out = dir.path().join("rows.jsonl");
    let status = hh()
        .args([
            "run",
            "--algo",
            "mg",
            "--epsilon",
            "0.05",
            "--phi",
            "0.2",
            "--n",
            "4096",
            "--seeds",
            "0..4",
            "--format",
            "json",
        ])
        .arg("--input")
        .arg(&stream)
        .arg("--output")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let rows = read_rows(OutputFormat::Json, std::fs::File::open(&out).unwrap()).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows
        .iter()
        .all(|r| r.recall_must == 1.0 && r.false_forbidden == 0));
}

#[test]
fn run_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.conf");
    std::fs::write(&config, "# small l1 run\nalgo = l1\nepsilon = 0.1\nphi = 0.3\nn = 2000\nm = 20000\nworkload = zipf\nzipf_s = 1.4\nseeds = 1,2\n").unwrap();
    let output = hh()
        .arg("run")
        .arg("--config")
        .arg(&config)
        .output()
        .unwrap();
    assert!(output.status.success());
    let rows = read_rows(OutputFormat::Csv, output.stdout.as_slice()).unwrap();
    assert_eq!(rows.iter().map(|r| r.seed).collect::<Vec<_>>(), vec![1, 2]);
}

#[test]
fn failures_exit_nonzero() {
    let missing = hh()
        .args([
            "run",
            "--algo",
            "cs",
            "--input",
            "/definitely/not/here",
            "--n",
            "10",
        ])
        .output()
        .unwrap();
    assert!(!missing.status.success());
    assert!(String::from_utf8_lossy(&missing.stderr).contains("not/here"));

    let unknown = hh().args(["run", "--algo", "heap"]).output().unwrap();
    assert!(!unknown.status.success());

    let bad_params = hh()
        .args(["run", "--algo", "mg", "--epsilon", "0.5", "--phi", "0.2"])
        .output()
        .unwrap();
    assert!(!bad_params.status.success());
}

#[test]
fn space_and_truth_verbs() {
    let space = hh().arg("space").output().unwrap();
    assert!(space.status.success());
    let text = String::from_utf8(space.stdout).unwrap();
    assert_eq!(text.lines().count(), 7);

    let truth = hh()
        .args([
            "truth",
            "--workload",
            "spike",
            "--n",
            "1000",
            "--m",
            "500",
            "--star",
            "9",
            "--f-star",
            "300",
        ])
        .output()
        .unwrap();
    assert!(truth.status.success());
    let v: serde_json::Value = serde_json::from_slice(&truth.stdout).unwrap();
    assert_eq!(v["l1"]["must"], serde_json::json!([9]));
}
