use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spin-manifold"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn presets_reproduce_golden_csv() {
    for (command, preset) in [
        ("curvature", "fig1"),
        ("speed", "fig2"),
        ("curvature-vs-speed", "fig3"),
        ("speed", "fig5a"),
        ("curvature-vs-speed", "fig5b"),
        ("curvature", "fig6"),
    ] {
        let out = run(&[command, "--preset", preset]);
        assert!(out.status.success(), "{preset}");
        assert_eq!(stdout(&out), golden(&format!("{preset}.csv")), "{preset}");
    }
}

#[test]
fn csv_columns_follow_the_command() {
    let first_line = |args: &[&str]| stdout(&run(args)).lines().next().unwrap().to_string();
    assert_eq!(first_line(&["curvature", "--n", "3", "--two-s", "2"]), "theta,R");
    assert_eq!(first_line(&["speed", "--n", "3", "--two-s", "2"]), "theta,v");
    assert_eq!(first_line(&["curvature-vs-speed", "--preset", "methane"]), "v,R,branch");
    assert_eq!(first_line(&["curvature", "--preset", "fig1"]), "n,two_s,theta,R");
    assert_eq!(first_line(&["curvature", "--preset", "fig6"]), "h_over_j,theta,R");
}

#[test]
fn conical_poles_are_reported_on_stderr() {
    let out = run(&["curvature", "--n", "3", "--two-s", "2", "--samples", "5"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 1 + 3);
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.matches("conical point").count(), 2);
}

#[test]
fn methane_peak_speed() {
    let out = run(&["speed", "--preset", "methane", "--samples", "2001"]);
    let peak = stdout(&out)
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .fold(0.0, f64::max);
    assert!((peak - 10.19).abs() < 0.005, "{peak}");
}

#[test]
fn flags_accept_negative_values() {
    let out = run(&["speed", "--n", "4", "--two-s", "1", "--j", "-6.2", "--samples", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let middle: Vec<&str> = text.lines().nth(2).unwrap().split(',').collect();
    let v: f64 = middle[1].parse().unwrap();
    assert!((v - 6.2 * 1.5f64.sqrt()).abs() < 1e-10, "{v}");
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(&path, r#"{"n": 3, "two_s": 2, "samples": 7}"#).unwrap();
    let from_file = run(&["speed", "--config", path.to_str().unwrap(), "--n", "2"]);
    let from_flags = run(&["speed", "--n", "2", "--two-s", "2", "--samples", "7"]);
    assert!(from_file.status.success());
    assert_eq!(stdout(&from_file), stdout(&from_flags));
}

#[test]
fn output_file_and_json_format() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("speed.json");
    let out = run(&["speed", "--n", "2", "--two-s", "1", "--samples", "3", "--format", "json", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["columns"], serde_json::json!(["theta", "v"]));
    assert_eq!(doc["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn invalid_configurations_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{ n: 3 ").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["speed", "--n", "1"],
        vec!["speed", "--two-s", "0"],
        vec!["speed", "--preset", "fig4"],
        vec!["speed", "--ratio", "3"],
        vec!["speed", "--samples", "1"],
        vec!["curvature", "--h-over-j", "1", "--theta-prime", "0.5"],
        vec!["curvature-vs-speed", "--h-over-j", "1"],
        vec!["speed", "--config", broken.to_str().unwrap()],
        vec!["speed", "--config", "/nonexistent/run.json"],
        vec!["field-optimize", "--n", "4", "--two-s", "2", "--theta", "0"],
        vec!["verify", "--only", "geodesics"],
    ];
    for args in cases {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

fn report(args: &[&str]) -> (Option<i32>, Value, String) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let mut full = vec!["verify", "--out", path.to_str().unwrap()];
    full.extend_from_slice(args);
    let out = run(&full);
    let text = std::fs::read_to_string(&path).unwrap();
    (out.status.code(), serde_json::from_str(&text).unwrap(), text)
}

#[test]
fn verify_default_passes_and_is_deterministic() {
    let (code, doc, text) = report(&[]);
    assert_eq!(code, Some(0));
    assert_eq!(doc["pass"], Value::Bool(true));
    let checks = doc["checks"].as_array().unwrap();
    assert!(checks.len() > 30);
    for check in checks {
        for key in ["name", "grid", "max_abs", "max_rel", "tol", "pass"] {
            assert!(check.get(key).is_some(), "{key}");
        }
        assert!(check["max_abs"].as_f64().unwrap().is_finite());
    }
    let (_, _, again) = report(&[]);
    assert_eq!(text, again);
}

#[test]
fn verify_fails_at_an_impossible_tolerance() {
    let (code, doc, _) = report(&["--tol", "1e-15", "--only", "metric,speed"]);
    assert_eq!(code, Some(1));
    assert_eq!(doc["pass"], Value::Bool(false));
}

#[test]
fn verify_only_runs_the_requested_category() {
    let (code, doc, _) = report(&["--only", "topology"]);
    assert_eq!(code, Some(0));
    let checks = doc["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 5);
    assert!(checks.iter().all(|c| c["category"] == "topology"));
    assert_eq!(doc["disabled"].as_array().unwrap().len(), 6);
}

#[test]
fn verify_prints_a_table() {
    let out = run(&["verify", "--only", "field_speeds"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("check"));
    assert!(text.contains("field_speeds v_min"));
    assert!(text.trim_end().ends_with("PASS"));
}

#[test]
fn field_optimize_worked_cases() {
    let quarter = std::f64::consts::FRAC_PI_4.to_string();
    let pi = std::f64::consts::PI.to_string();
    let out = run(&[
        "field-optimize",
        "--n",
        "4",
        "--two-s",
        "2",
        "--theta",
        &quarter,
        "--theta-prime",
        &pi,
        "--h-over-j",
        "1",
        "--scan-direction",
    ]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((doc["h_over_j_min"].as_f64().unwrap() - 3.0 * 2f64.sqrt()).abs() < 1e-12);
    assert_eq!(doc["reduction_applied"], Value::Bool(true));
    let min = &doc["scan"]["argmin"];
    let max = &doc["scan"]["argmax"];
    assert!((min["theta_prime"].as_f64().unwrap() - 3.0 * std::f64::consts::FRAC_PI_4).abs() < 1e-12);
    assert!((min["v"].as_f64().unwrap() - 9.5f64.sqrt()).abs() < 1e-12);
    assert!((max["theta_prime"].as_f64().unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
    assert!((max["phi_prime"].as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-12);
    assert!((max["v"].as_f64().unwrap() - 33.5f64.sqrt()).abs() < 1e-12);

    let half = std::f64::consts::FRAC_PI_2.to_string();
    let out = run(&["field-optimize", "--n", "4", "--two-s", "2", "--theta", &half, "--theta-prime", "1"]);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["h_over_j_min"].as_f64().unwrap().abs() < 1e-12);
}
