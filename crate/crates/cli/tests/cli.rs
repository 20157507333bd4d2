//! End-to-end checks of the `fairtt` binary: command output, file artifacts
//! and the exit-code contract.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fairtt() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fairtt"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

#[test]
fn validate_reports_instance_shape() {
    let out = fairtt()
        .args(["validate"])
        .arg(fixture("toy_mmf.ctt"))
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("toy_mmf"));
    assert!(text.contains("4 courses"));
    assert!(text.trim_end().ends_with("ok"));
}

#[test]
fn validate_rejects_malformed_instance_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.ctt");
    std::fs::write(&bad, "Name: broken\nCourses: nope\n").unwrap();
    let out = fairtt().arg("validate").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_file_is_a_runtime_error() {
    let out = fairtt()
        .args(["validate", "/no/such/file.ctt"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_2() {
    let out = fairtt().args(["no-such-command"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_flags_infeasible_solution() {
    let dir = tempfile::tempdir().unwrap();
    let sol = dir.path().join("bad.sol");
    // Both c1 lectures in the same period: H1.
    std::fs::write(&sol, "c1 r1 0 0\nc1 r2 0 0\nc2 r1 1 0\nc3 r1 0 1\nc3 r2 1 1\nc4 r2 0 1\n")
        .unwrap();
    let out = fairtt()
        .arg("validate")
        .arg(fixture("toy_mmf.ctt"))
        .arg(&sol)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("H1"));
}

#[test]
fn solve_evaluate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let sol = dir.path().join("best.sol");
    let trace = dir.path().join("trace.csv");
    let out = fairtt()
        .arg("solve-mmf")
        .arg(fixture("toy_mmf.ctt"))
        .args(["--timeout-s", "0.3", "--seed", "7"])
        .arg("--out")
        .arg(&sol)
        .arg("--trace")
        .arg(&trace)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let trace_text = std::fs::read_to_string(&trace).unwrap();
    assert!(trace_text.starts_with("elapsed_s,best_allocation,total_penalty"));

    let out = fairtt()
        .arg("evaluate")
        .arg(fixture("toy_mmf.ctt"))
        .arg(&sol)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("total_penalty:"));
    assert!(text.contains("allocation:"));
    assert!(text.contains("jain_shifted:"));
}

#[test]
fn batch_then_compare_on_synthetic_tables() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("batch.csv");
    let out = fairtt()
        .arg("batch")
        .arg(fixture("toy_mmf.ctt"))
        .args([
            "--mode", "mmf", "--runs", "3", "--timeout-s", "0.1", "--seed", "5", "--jobs", "2",
        ])
        .arg("--out")
        .arg(&csv_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = std::fs::read_to_string(&csv_path).unwrap();
    assert!(table.starts_with("seed,allocation,worst,total_penalty,wall_s"));
    assert_eq!(table.lines().count(), 4);

    // Synthetic tables exercise the comparison itself deterministically.
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let header = "seed,allocation,worst,total_penalty,wall_s\n";
    std::fs::write(
        &a,
        format!("{header}0,td,1,10,0.1\n1,td,2,11,0.1\n2,td,3,12,0.1\n"),
    )
    .unwrap();
    std::fs::write(
        &b,
        format!("{header}0,td,4,20,0.1\n1,td,5,21,0.1\n2,td,6,22,0.1\n"),
    )
    .unwrap();
    let out = fairtt()
        .arg("compare")
        .arg(&a)
        .arg(&b)
        .args(["--column", "worst"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("p_value: 0.050000"), "{text}");
    assert!(text.contains("direction: A_better"));
    assert!(text.contains("significant_at_0.01: false"));
}

#[test]
fn solve_jfi_exports_archive_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("front");
    let out = fairtt()
        .arg("solve-jfi")
        .arg(fixture("toy_jfi.ctt"))
        .args(["--timeout-s", "0.3", "--seed", "3"])
        .arg("--out-dir")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let archive = std::fs::read_to_string(out_dir.join("archive.csv")).unwrap();
    assert!(archive.starts_with("jain_index,total_penalty,solution_file"));
    let rows = archive.lines().count() - 1;
    assert!(rows >= 1);
    // Every referenced solution file exists and re-validates.
    for line in archive.lines().skip(1) {
        let file = line.rsplit(',').next().unwrap();
        let sol = out_dir.join(file);
        let check = fairtt()
            .arg("validate")
            .arg(fixture("toy_jfi.ctt"))
            .arg(&sol)
            .output()
            .unwrap();
        assert!(check.status.success());
    }

    let report = std::fs::read_to_string(out_dir.join("pareto.csv")).unwrap();
    assert!(report.starts_with("jain_index,penalty,below_tradeoff_line"));

    // The standalone report command reproduces the rows from the index.
    let out = fairtt()
        .arg("pareto")
        .arg(out_dir.join("archive.csv"))
        .args(["--seed-point", "0.5,4"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("jain_index,penalty,below_tradeoff_line"));
}

#[test]
fn jobs_env_var_is_honored() {
    let out = fairtt()
        .arg("batch")
        .arg(fixture("toy_mmf.ctt"))
        .args(["--mode", "mmf", "--runs", "2", "--timeout-s", "0.05"])
        .env("FAIRTT_JOBS", "2")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).starts_with("seed,allocation"));
}
