//! End-to-end command tests: exit codes, report contents, and the
//! machine-readable round trips.

use std::fs;
use std::path::Path;
use std::process::Command;

use kr_workbench::report::{EmbeddingReport, RaEpiReport};
use kr_workbench_cli::{run, RunOutput, EXIT_NEGATIVE, EXIT_OK, EXIT_USAGE};

fn krwb(args: &[&str]) -> RunOutput {
    let mut full = vec!["krwb"];
    full.extend_from_slice(args);
    run(full)
}

fn write_lattice(dir: &Path, file: &str, name: &str, n: usize, covers: &[[usize; 2]]) -> String {
    let path = dir.join(file);
    let json = serde_json::json!({ "name": name, "n": n, "covers": covers });
    fs::write(&path, serde_json::to_string_pretty(&json).unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

fn chain3(dir: &Path) -> String {
    write_lattice(dir, "chain3.json", "chain3", 3, &[[0, 1], [1, 2]])
}

fn m3(dir: &Path) -> String {
    write_lattice(
        dir,
        "m3.json",
        "m3",
        5,
        &[[0, 1], [0, 2], [0, 3], [1, 4], [2, 4], [3, 4]],
    )
}

fn n5(dir: &Path) -> String {
    write_lattice(
        dir,
        "n5.json",
        "n5",
        5,
        &[[0, 1], [1, 3], [0, 2], [3, 4], [2, 4]],
    )
}

#[test]
fn check_modular_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let m3 = m3(dir.path());
    let n5 = n5(dir.path());

    let out = krwb(&["check-modular", &m3]);
    assert_eq!(out.code, EXIT_OK, "stderr: {}", out.stderr);
    assert!(out.stdout.contains("modular"));

    let out = krwb(&["check-modular", &n5]);
    assert_eq!(out.code, EXIT_NEGATIVE);
    assert!(out.stdout.contains("not modular"));
    assert!(out.stdout.contains("x=1 y=2 z=3"));

    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ this is not json").unwrap();
    let out = krwb(&["check-modular", bad.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_USAGE);
    assert!(out.stderr.contains("error"));

    let out = krwb(&["check-modular", "/nonexistent/file.json"]);
    assert_eq!(out.code, EXIT_USAGE);
}

#[test]
fn check_modular_json_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let n5 = n5(dir.path());
    let out = krwb(&["check-modular", &n5, "--format", "json"]);
    assert_eq!(out.code, EXIT_NEGATIVE);
    let parsed: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(parsed["modular"], serde_json::Value::Bool(false));
    assert_eq!(parsed["counterexample"]["x"], 1);
}

#[test]
fn build_frame_and_cm() {
    let dir = tempfile::tempdir().unwrap();
    let c3 = chain3(dir.path());

    let out = krwb(&["build-frame", &c3, "--format", "json"]);
    assert_eq!(out.code, EXIT_OK);
    let parsed: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(parsed["frame"]["n"], 3);
    assert_eq!(parsed["frame"]["zero"], 0);

    // Feed the emitted frame back in as a frame file.
    let frame_path = dir.path().join("frame.json");
    fs::write(&frame_path, parsed["frame"].to_string()).unwrap();
    let out = krwb(&["build-cm", frame_path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.code, EXIT_OK);
    let algebra: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(algebra["atoms"], 3);
    assert_eq!(algebra["identity"], serde_json::json!([0]));

    // And the algebra dump works for check-axioms as well.
    let algebra_path = dir.path().join("algebra.json");
    fs::write(&algebra_path, out.stdout).unwrap();
    let out = krwb(&["check-axioms", algebra_path.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_OK, "stderr: {}", out.stderr);
    assert!(out.stdout.contains("axiom 10"));
}

#[test]
fn frame_of_pentagon_fails_pasch() {
    let dir = tempfile::tempdir().unwrap();
    let n5 = n5(dir.path());
    let out = krwb(&["build-frame", &n5]);
    assert_eq!(out.code, EXIT_NEGATIVE);
    assert!(out.stdout.contains("pasch"));
}

#[test]
fn e_lattice_and_maddux() {
    let dir = tempfile::tempdir().unwrap();
    let m3 = m3(dir.path());

    let out = krwb(&["e-lattice", &m3, "--format", "json"]);
    assert_eq!(out.code, EXIT_OK);
    let parsed: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(parsed["elements"].as_array().unwrap().len(), 5);

    let out = krwb(&["verify-maddux", &m3]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("5 of them"));
}

#[test]
fn embed_report_replays_from_cli_output() {
    let dir = tempfile::tempdir().unwrap();
    let c3 = chain3(dir.path());
    let out = krwb(&["embed", &c3, "--k", "0,2", "--format", "json"]);
    assert_eq!(out.code, EXIT_OK, "stderr: {}", out.stderr);
    let report = EmbeddingReport::from_json(&out.stdout).unwrap();
    report.revalidate(16).unwrap();
    assert_eq!(report.to_json().trim(), out.stdout.trim());
}

#[test]
fn build_uv_text_output() {
    let dir = tempfile::tempdir().unwrap();
    let c3 = chain3(dir.path());

    let out = krwb(&["build-uv", &c3, "--k", "0,2"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("|U| = 4, |V| = 8"));
    assert!(out.stdout.contains("U ⊊ V: yes"));

    let out = krwb(&["build-uv", &c3, "--k", "0,1,2"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("U = V"));
}

#[test]
fn epi_test_against_default_and_explicit_targets() {
    let dir = tempfile::tempdir().unwrap();
    let c3 = chain3(dir.path());

    // Default target class distinguishes the inclusion.
    let out = krwb(&["epi-test", &c3, "--k", "0,2", "--format", "json"]);
    assert_eq!(out.code, EXIT_NEGATIVE);
    let report = RaEpiReport::from_json(&out.stdout).unwrap();
    report.revalidate().unwrap();
    assert_eq!(report.to_json().trim(), out.stdout.trim());

    // Against its own complex algebra alone there is only one map.
    let targets = dir.path().join("targets.json");
    fs::write(
        &targets,
        r#"[{"name":"chain3","n":3,"covers":[[0,1],[1,2]]}]"#,
    )
    .unwrap();
    let out = krwb(&[
        "epi-test",
        &c3,
        "--k",
        "0,2",
        "--targets",
        targets.to_str().unwrap(),
    ]);
    assert_eq!(out.code, EXIT_OK, "stdout: {}", out.stdout);
    assert!(out.stdout.contains("epic relative to 1 target(s)"));
}

#[test]
fn pipeline_reports() {
    let dir = tempfile::tempdir().unwrap();
    let c3 = chain3(dir.path());
    let n5 = n5(dir.path());

    let out = krwb(&["pipeline", &c3, "--k", "0,2"]);
    assert_eq!(out.code, EXIT_OK);
    let last = out.stdout.trim_end().lines().last().unwrap();
    assert!(last.contains("U ⊊ V: yes"), "last line: {last}");

    let out = krwb(&["pipeline", &c3, "--k", "0,1,2"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.trim_end().ends_with("U = V"));

    let out = krwb(&["pipeline", &n5, "--k", "0,4"]);
    assert_eq!(out.code, EXIT_NEGATIVE);
    assert!(out
        .stdout
        .contains("pipeline aborted at stage: frame axioms"));
    assert!(out.stdout.contains("pasch"));

    let out = krwb(&["pipeline", &c3, "--k", "0,2", "--format", "json"]);
    assert_eq!(out.code, EXIT_OK);
    let parsed: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert!(parsed["aborted_at"].is_null());
    let stages = parsed["stages"].as_array().unwrap();
    assert!(stages.iter().all(|s| s["status"] != "fail"));
}

#[test]
fn corpus_runner() {
    // Bundled corpus passes all suites.
    let out = krwb(&["corpus"]);
    assert_eq!(
        out.code, EXIT_OK,
        "stdout: {}\nstderr: {}",
        out.stdout, out.stderr
    );
    assert!(out.stdout.contains("m3_m3"));
    assert!(!out.stdout.contains("FAIL"));

    // Empty directory: empty table, success.
    let dir = tempfile::tempdir().unwrap();
    let out = krwb(&["corpus", dir.path().to_str().unwrap()]);
    assert_eq!(out.code, EXIT_OK);

    // One corrupt file is reported per row and does not stop the run.
    chain3(dir.path());
    fs::write(dir.path().join("corrupt.json"), "not json at all").unwrap();
    let out = krwb(&["corpus", dir.path().to_str().unwrap()]);
    assert_eq!(out.code, EXIT_USAGE);
    assert!(out.stdout.contains("corrupt"));
    assert!(
        out.stdout.contains("chain3"),
        "healthy rows still processed"
    );
}

#[test]
fn corpus_json_round_trip() {
    let out = krwb(&["corpus", "--format", "json"]);
    assert_eq!(out.code, EXIT_OK);
    let rows: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 12);
    let n5_row = rows.iter().find(|r| r["name"] == "n5").unwrap();
    assert_eq!(n5_row["modular"], serde_json::Value::Bool(false));
    assert_eq!(n5_row["pasch_agrees"], serde_json::Value::Bool(true));
}

#[test]
fn dot_output() {
    let dir = tempfile::tempdir().unwrap();
    let m3 = m3(dir.path());
    let dot_path = dir.path().join("m3.dot");
    let out = krwb(&["check-modular", &m3, "--dot", dot_path.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_OK);
    let dot = fs::read_to_string(&dot_path).unwrap();
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("0 -> 1;"));
}

#[test]
fn max_n_flag_caps_carrier() {
    let dir = tempfile::tempdir().unwrap();
    let c3 = chain3(dir.path());
    let out = krwb(&["check-modular", &c3, "--max-n", "2"]);
    assert_eq!(out.code, EXIT_USAGE);
    assert!(out.stderr.contains("exceeds the cap"));
}

#[test]
fn env_var_overrides_cap() {
    // Exercise the real binary so the environment stays isolated.
    let dir = tempfile::tempdir().unwrap();
    let c3 = chain3(dir.path());
    let output = Command::new(env!("CARGO_BIN_EXE_krwb"))
        .args(["check-modular", &c3])
        .env("WORKBENCH_MAX_N", "2")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(EXIT_USAGE));

    let output = Command::new(env!("CARGO_BIN_EXE_krwb"))
        .args(["check-modular", &c3])
        .env("WORKBENCH_MAX_N", "8")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(EXIT_OK));
}

#[test]
fn usage_errors() {
    let out = krwb(&["no-such-command"]);
    assert_eq!(out.code, EXIT_USAGE);

    let out = krwb(&["embed", "/tmp/whatever.json"]);
    assert_eq!(out.code, EXIT_USAGE, "--k is required");

    let out = krwb(&["--help"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("pipeline"));
}
