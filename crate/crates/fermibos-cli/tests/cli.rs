//! End-to-end tests of the compiled binary: flag handling, artifact
//! formats, exit codes, and determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fermibos"))
}

fn run(args: &[&str]) -> Output {
    binary().args(args).output().expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn write_identity(dir: &Path, n: usize) -> std::path::PathBuf {
    let mut entries = Vec::new();
    for r in 0..n {
        for c in 0..n {
            entries.push([if r == c { 1.0 } else { 0.0 }, 0.0]);
        }
    }
    let path = dir.join(format!("id{n}.json"));
    let text = serde_json::json!({"rows": n, "cols": n, "entries": entries});
    fs::write(&path, text.to_string()).unwrap();
    path
}

fn write_balanced_splitter(dir: &Path) -> std::path::PathBuf {
    let s = 1.0 / 2.0_f64.sqrt();
    let text = serde_json::json!({
        "rows": 2,
        "cols": 2,
        "entries": [[s, 0.0], [s, 0.0], [s, 0.0], [-s, 0.0]],
    });
    let path = dir.join("splitter.json");
    fs::write(&path, text.to_string()).unwrap();
    path
}

#[test]
fn permanent_of_identity_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = write_identity(dir.path(), 3);
    let output = run(&["permanent", "--matrix", matrix.to_str().unwrap()]);
    assert!(output.status.success());
    assert_eq!(stdout_of(&output).trim(), "1");
}

#[test]
fn naive_and_ryser_permanents_agree() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = write_balanced_splitter(dir.path());
    let fast = run(&["permanent", "--matrix", matrix.to_str().unwrap()]);
    let slow = run(&["permanent", "--matrix", matrix.to_str().unwrap(), "--naive"]);
    assert!(fast.status.success() && slow.status.success());
    assert_eq!(stdout_of(&fast), stdout_of(&slow));
    let value: f64 = stdout_of(&fast).trim().parse().unwrap();
    assert!(value.abs() < 1e-12);
}

#[test]
fn malformed_matrix_exits_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, r#"{"rows":2,"cols":2,"entries":[[1.0,0.0]]}"#).unwrap();
    let output = run(&["permanent", "--matrix", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    let missing = run(&["permanent", "--matrix", "/does/not/exist.json"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn unknown_flags_exit_with_usage_code() {
    let output = run(&["permanent", "--nonsense"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn distribution_emits_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = write_balanced_splitter(dir.path());
    let json_out = run(&[
        "distribution",
        "--matrix",
        matrix.to_str().unwrap(),
        "--input",
        "1,1",
        "--statistics",
        "bosonic",
    ]);
    assert!(json_out.status.success());
    let parsed: serde_json::Value = serde_json::from_str(&stdout_of(&json_out)).unwrap();
    assert_eq!(parsed["M"], 2);
    assert_eq!(parsed["statistics"], "bosonic");

    let csv_path = dir.path().join("dist.csv");
    let csv_out = run(&[
        "distribution",
        "--matrix",
        matrix.to_str().unwrap(),
        "--input",
        "1,1",
        "--statistics",
        "bosonic",
        "--format",
        "csv",
        "--output",
        csv_path.to_str().unwrap(),
    ]);
    assert!(csv_out.status.success());
    let text = fs::read_to_string(&csv_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "m_1,m_2,p");
    assert_eq!(lines.clone().count(), 3);
    // The HOM dip: no coincidences on a balanced splitter.
    let coincidence = lines.find(|line| line.starts_with("1,1,")).unwrap();
    let p: f64 = coincidence.rsplit(',').next().unwrap().parse().unwrap();
    assert!(p.abs() < 1e-12);
}

#[test]
fn fermionic_distribution_rejects_bunched_input() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = write_balanced_splitter(dir.path());
    let output = run(&[
        "distribution",
        "--matrix",
        matrix.to_str().unwrap(),
        "--input",
        "2,0",
        "--statistics",
        "fermionic",
    ]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn duality_report_carries_the_verdict() {
    let output = run(&[
        "duality", "--eps1", "A", "--eps2", "A", "--input", "1,1", "--seed", "5",
    ]);
    assert!(output.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    assert_eq!(report["verdict"], "bosonic");
    assert_eq!(report["effective"], "S");
    assert!(report["max_abs_deviation"].as_f64().unwrap() < 1e-10);

    let fermionic = run(&[
        "duality",
        "--eps1",
        "S",
        "--eps2",
        "A",
        "--input",
        "1,1",
        "--seed",
        "5",
        "--overlap",
        "0.5",
    ]);
    assert!(fermionic.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&fermionic)).unwrap();
    assert_eq!(report["verdict"], "fermionic");
}

#[test]
fn duality_rejects_overlap_for_three_particles() {
    let output = run(&[
        "duality",
        "--eps1",
        "S",
        "--eps2",
        "S",
        "--input",
        "1,1,1",
        "--overlap",
        "0.5",
    ]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn hom_scan_covers_the_grid() {
    let output = run(&["hom", "--eps2", "S", "--grid", "0:1:0.5", "--format", "csv"]);
    assert!(output.status.success());
    let text = stdout_of(&output);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "overlap,coincidence,note");
    assert_eq!(lines.len(), 4);
    let classical: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((classical - 0.5).abs() < 1e-12);
    let dip: f64 = lines[3].split(',').nth(1).unwrap().parse().unwrap();
    assert!(dip.abs() < 1e-12);

    let json = run(&["hom", "--eps2", "A", "--grid", "0:1:0.5"]);
    assert!(json.status.success());
    let points: serde_json::Value = serde_json::from_str(&stdout_of(&json)).unwrap();
    let points = points.as_array().unwrap();
    assert_eq!(points.len(), 3);
    // Anti-symmetrized internals: certain coincidence until the state
    // vanishes at full overlap.
    assert_eq!(points[0]["coincidence"].as_f64().unwrap(), 1.0);
    assert!(points[2]["coincidence"].is_null());
    assert!(points[2]["note"].as_str().unwrap().contains("det"));
}

#[test]
fn scattershot_writes_records_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let records = dir.path().join("records.jsonl");
    let output = run(&[
        "scattershot",
        "--modes",
        "4",
        "--particles",
        "2",
        "--trials",
        "100",
        "--seed",
        "11",
        "--output",
        records.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let summary: serde_json::Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    assert_eq!(summary["trials"], 100);
    assert_eq!(summary["modes"], 4);
    assert!((summary["expected_non_bunching"].as_f64().unwrap() - 0.75).abs() < 1e-12);

    let text = fs::read_to_string(&records).unwrap();
    assert_eq!(text.lines().count(), 100);
    for line in text.lines() {
        let record: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(record["bunched"].is_boolean());
        assert_eq!(record["output"].is_null(), record["bunched"] == true);
    }
}

#[test]
fn scattershot_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    let mut outputs = Vec::new();
    for (path, threads) in [(&a, "1"), (&b, "4")] {
        let output = binary()
            .args([
                "scattershot",
                "--modes",
                "3",
                "--particles",
                "2",
                "--trials",
                "200",
                "--seed",
                "21",
                "--output",
                path.to_str().unwrap(),
            ])
            .env("DUALITY_SAMPLER_THREADS", threads)
            .output()
            .unwrap();
        assert!(output.status.success());
        outputs.push(stdout_of(&output));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn scattershot_rejects_more_sources_than_modes() {
    let output = run(&["scattershot", "--modes", "2", "--particles", "3"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn verify_single_suite_passes() {
    let output = run(&["verify", "--suite", "projector-identity"]);
    assert!(output.status.success());
    let text = stdout_of(&output);
    assert!(text.contains("suite projector-identity"));
    assert!(text.trim_end().ends_with("OK"));
}

#[test]
fn verify_rejects_unknown_suite() {
    let output = run(&["verify", "--suite", "definitely-not-a-suite"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn bench_emits_csv_for_small_sizes() {
    let output = run(&["bench", "--min", "2", "--max", "4", "--repeats", "1"]);
    assert!(output.status.success());
    let text = stdout_of(&output);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,ryser_seconds,naive_seconds");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("2,"));
    let bad = run(&["bench", "--min", "8", "--max", "25"]);
    assert_eq!(bad.status.code(), Some(2));
}
