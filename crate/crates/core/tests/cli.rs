//! The `influence` binary: subcommands, exit codes and artifacts.

use std::process::Command;

fn influence(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_influence"))
        .args(args)
        .env_remove("INFLUENCE_FIXTURES")
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn analyze_three_agent() {
    let (code, out, _) = influence(&["analyze", "fixtures/three_agent"]);
    assert_eq!(code, 0);
    assert!(out.contains("sending blocks:   {1} {2}"));
    assert!(out.contains("receiving blocks: {3}"));
    assert!(out.contains("spectral radius {3}: 0.700000"));
    assert!(out.contains("3: (0.3333, 0.6667)"));
}

#[test]
fn analyze_strong_network_skips_influence() {
    let (code, out, _) = influence(&["analyze", "strong_three"]);
    assert_eq!(code, 0);
    assert!(out.contains("receiving blocks: none"));
    assert!(out.contains("no receiving agents; influence matrix skipped"));
}

#[test]
fn json_analysis_has_stable_fields() {
    let (code, out, _) = influence(&["analyze", "fig6_caseA", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["receiving_agents"], serde_json::json!([6, 7, 8]));
    let w = v["influence_transpose"][0][1].as_f64().unwrap();
    assert!((w - 53.0 / 131.0).abs() < 1e-10);
    assert_eq!(v["assumptions"]["regime"], "total_influence");
}

#[test]
fn predict_tables() {
    let (code, out, _) = influence(&["predict", "fig6_caseA"]);
    assert_eq!(code, 0);
    assert!(out.contains("(0.5534, 0.4466, 0.0000)"));
    let (code, out, _) = influence(&["predict", "three_agent"]);
    assert_eq!(code, 0);
    assert!(out.contains("(0.3333, 0.6667, 0.0000)"));
}

#[test]
fn simulate_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    let (code, out, _) = influence(&[
        "simulate",
        "fig6_caseA",
        "--steps",
        "50",
        "--seed",
        "1",
        "--stride",
        "10",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("1 trial(s) of 50 steps"));
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 1 + 6 * 8);
}

#[test]
fn simulate_rejects_zero_steps() {
    let (code, _, err) = influence(&["simulate", "three_agent", "--steps", "0"]);
    assert_eq!(code, 1);
    assert!(err.contains("steps"));
}

#[test]
fn verify_exit_codes() {
    assert_eq!(
        influence(&["verify", "fig6_caseA", "--steps", "7000", "--tol", "0.02"]).0,
        0
    );
    let (code, out, _) = influence(&["verify", "fig6_caseB", "--steps", "7000"]);
    assert_eq!(code, 0);
    assert!(out.contains("inside"));
    let (code, out, err) = influence(&["verify", "three_agent_violated"]);
    assert_eq!(code, 2);
    assert!(out.contains("FAIL") && err.contains("verification failed"));
}

#[test]
fn verify_names_worst_offender() {
    let (code, out, _) = influence(&[
        "verify",
        "fig6_caseA",
        "--steps",
        "150",
        "--window",
        "50",
        "--tol",
        "1e-9",
    ]);
    assert_eq!(code, 2);
    assert!(out.contains("verification FAILED: agent "), "{out}");
}

#[test]
fn bad_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    let text =
        include_str!("../fixtures/three_agent.toml").replace("[0.0, 0.0, 0.7]", "[0.0, 0.0, 0.6]");
    std::fs::write(&bad, text).unwrap();
    let (code, _, err) = influence(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("column 3"), "{err}");
    assert_eq!(influence(&["analyze", "/nonexistent.toml"]).0, 3);
}

#[test]
fn fixture_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let text = include_str!("../fixtures/three_agent.toml")
        .replace("name = \"three_agent\"", "name = \"local\"");
    std::fs::write(dir.path().join("mine.toml"), text).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_influence"))
        .args(["analyze", "mine"])
        .env("INFLUENCE_FIXTURES", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .starts_with("scenario local"));
}
