//! End-to-end tests of the `mubcert` binary: wire formats, exit codes,
//! round-trip fidelity and determinism of output files.

#![allow(clippy::excessive_precision)]

use std::path::Path;
use std::process::{Command, Output};

fn mubcert(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mubcert"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn mub_writes_a_valid_pair_and_reloads() {
    let dir = tempfile::tempdir().unwrap();
    let out = mubcert(&["mub", "--dim", "2", "--out", "pair.json"], dir.path());
    assert!(out.status.success(), "{out:?}");
    let pair =
        mubcert::measurements::pair_from_json(&read(dir.path(), "pair.json"), "pair.json").unwrap();
    assert!(mubcert::measurements::is_mub_pair(&pair, 1e-9));
}

#[test]
fn mub_dimension_six_works() {
    let dir = tempfile::tempdir().unwrap();
    let out = mubcert(&["mub", "--dim", "6", "--out", "pair6.json"], dir.path());
    assert!(out.status.success());
    let pair = mubcert::measurements::pair_from_json(&read(dir.path(), "pair6.json"), "pair6.json")
        .unwrap();
    assert!(mubcert::measurements::is_mub_pair(&pair, 1e-9));
}

#[test]
fn mub_rejects_dimension_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = mubcert(&["mub", "--dim", "1", "--out", "bad.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn certify_builtin_dimension_four() {
    let dir = tempfile::tempdir().unwrap();
    let out = mubcert(
        &["certify", "--dim", "4", "--out", "report.json"],
        dir.path(),
    );
    assert!(out.status.success(), "{out:?}");
    let report: serde_json::Value = serde_json::from_str(&read(dir.path(), "report.json")).unwrap();
    assert!((report["p_bar"].as_f64().unwrap() - 0.75).abs() < 1e-9);
    let incompat = report["asp_bounds"]["incompat_upper"].as_f64().unwrap();
    assert!((incompat - 2.0 / 3.0).abs() < 1e-7);
    assert_eq!(report["direct"]["mub_flag"], serde_json::json!(true));
    assert_eq!(report["log_base"], serde_json::json!(2));
}

#[test]
fn certify_with_noise_hits_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = mubcert(
        &[
            "certify",
            "--dim",
            "4",
            "--noise",
            "0.9",
            "--out",
            "noisy.json",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&read(dir.path(), "noisy.json")).unwrap();
    assert!((report["p_bar"].as_f64().unwrap() - 0.7).abs() < 1e-9);
    assert_eq!(report["direct"]["mub_flag"], serde_json::json!(false));
}

#[test]
fn certify_file_round_trip_matches_builtin() {
    let dir = tempfile::tempdir().unwrap();
    assert!(
        mubcert(&["mub", "--dim", "3", "--out", "pair.json"], dir.path())
            .status
            .success()
    );
    assert!(mubcert(
        &[
            "certify",
            "--measurements",
            "pair.json",
            "--out",
            "from_file.json"
        ],
        dir.path()
    )
    .status
    .success());
    assert!(mubcert(
        &["certify", "--dim", "3", "--out", "builtin.json"],
        dir.path()
    )
    .status
    .success());
    // 17-significant-digit serialisation is exact, so the round trip through
    // the measurement file reproduces the report byte for byte.
    assert_eq!(
        read(dir.path(), "from_file.json"),
        read(dir.path(), "builtin.json")
    );
}

#[test]
fn certify_rejects_malformed_json_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("broken.json"), "{ not json at all").unwrap();
    let out = mubcert(
        &[
            "certify",
            "--measurements",
            "broken.json",
            "--out",
            "report.json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("broken.json"), "stderr: {stderr}");
}

#[test]
fn certify_rejects_incomplete_povm_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    // A = { |0><0|, |0><0| } does not sum to the identity.
    let op = serde_json::json!([[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]);
    let id_half = serde_json::json!([[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]]);
    let doc = serde_json::json!({ "dim": 2, "A": [op, op], "B": [id_half, id_half] });
    std::fs::write(dir.path().join("bad.json"), doc.to_string()).unwrap();
    let out = mubcert(
        &["certify", "--measurements", "bad.json", "--out", "r.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("identity"));
}

#[test]
fn sweep_example_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = mubcert(
        &[
            "sweep",
            "--dim",
            "4",
            "--bound",
            "entropy",
            "--points",
            "3",
            "--range",
            "0.5625",
            "0.75",
            "--out",
            "curve.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{out:?}");
    let csv = read(dir.path(), "curve.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "p_bar,entropy");
    let row: Vec<&str> = lines.nth(1).unwrap().split(',').collect();
    let p: f64 = row[0].parse().unwrap();
    let v: f64 = row[1].parse().unwrap();
    assert!((p - 0.65625).abs() < 1e-12);
    assert!((v - 2.643_856_189_774_724_7).abs() < 1e-9);
}

#[test]
fn sweep_all_bounds_yields_four_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = mubcert(
        &[
            "sweep", "--dim", "4", "--bound", "all", "--points", "50", "--out", "all.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let csv = read(dir.path(), "all.csv");
    assert!(csv.starts_with("p_bar,entropy,norms,incompat,uncertainty\n"));
    assert_eq!(csv.lines().count(), 51);
}

#[test]
fn optimize_is_deterministic_and_reports_gap() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "optimize",
        "--dim",
        "2",
        "--restarts",
        "3",
        "--iters",
        "60",
        "--seed",
        "5",
        "--out",
        "seesaw.json",
    ];
    let out1 = mubcert(&args, dir.path());
    assert!(out1.status.success(), "{out1:?}");
    let first = read(dir.path(), "seesaw.json");
    let out2 = mubcert(&args, dir.path());
    assert!(out2.status.success());
    assert_eq!(first, read(dir.path(), "seesaw.json"));
    let stdout = String::from_utf8_lossy(&out1.stdout);
    assert!(stdout.contains("best_asp"), "stdout: {stdout}");
    assert!(stdout.contains("gap_to_ideal"));
    let doc: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert!(doc["best_asp"].as_f64().unwrap() <= 0.853_553_390_6 + 1e-7);
    assert_eq!(doc["restarts_run"], serde_json::json!(3));
}

#[test]
fn optimize_rejects_dimension_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = mubcert(&["optimize", "--dim", "1", "--out", "x.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_single_suite_prints_pass_line() {
    let dir = tempfile::tempdir().unwrap();
    let out = mubcert(
        &[
            "verify", "--suite", "hlemma", "--trials", "1000000", "--seed", "7",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("PASS hlemma"), "stdout: {stdout}");
    assert!(stdout.contains("worst_margin"));
}

#[test]
fn verify_unknown_suite_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = mubcert(&["verify", "--suite", "nope"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope"));
}

#[test]
fn verify_json_output_and_thread_cap() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_mubcert"))
        .args([
            "verify", "--suite", "schur", "--trials", "500", "--dim", "3", "--seed", "11", "--json",
        ])
        .env("MUBCERT_THREADS", "1")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let parsed: Vec<serde_json::Value> =
        serde_json::from_slice(&out.stdout).expect("valid JSON array");
    assert_eq!(parsed.len(), 1);
    assert_eq!(parsed[0]["suite_name"], serde_json::json!("schur"));
    assert_eq!(parsed[0]["passed"], serde_json::json!(true));
    assert_eq!(parsed[0]["trials"], serde_json::json!(500));
}

#[test]
fn verify_all_quick_smoke() {
    let dir = tempfile::tempdir().unwrap();
    let out = mubcert(
        &[
            "verify", "--suite", "all", "--trials", "64", "--dim", "3", "--seed", "13",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{out:?}");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS")).count(), 8);
}
