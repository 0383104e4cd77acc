use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twistconn")).args(args).output().expect("binary runs")
}

fn run_json(sub: &str, name: &str, extra: &[&str]) -> (i32, Value) {
    let path = scenario(name);
    let mut args = vec![sub, "--scenario", path.to_str().unwrap(), "--format", "json"];
    args.extend_from_slice(extra);
    let out = run(&args);
    let json = serde_json::from_slice(&out.stdout).expect("json output");
    (out.status.code().unwrap(), json)
}

fn status<'a>(report: &'a Value, id: &str) -> &'a str {
    report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["id"] == id)
        .unwrap_or_else(|| panic!("no check {id}"))["verdict"]["status"]
        .as_str()
        .unwrap()
}

#[test]
fn passing_scenario_exits_zero() {
    let (code, report) = run_json("theorem", "grassmann.toml", &["--caps", "2,2"]);
    assert_eq!(code, 0);
    assert_eq!(status(&report, "product-leibniz"), "pass");
    assert_eq!(status(&report, "curvature-theorem"), "pass");
    assert_eq!(report["scenario"]["caps"], "2,2");
}

#[test]
fn counterexample_exits_one_with_witness() {
    let (code, report) = run_json("check-hypotheses", "dy_violation.toml", &["--caps", "2,2"]);
    assert_eq!(code, 1);
    let c = report["checks"].as_array().unwrap().iter().find(|c| c["id"] == "nabla2cond1").unwrap();
    assert_eq!(c["verdict"]["status"], "fail");
    assert!(c["verdict"]["witness"]["input"].is_string());
    assert!(c["violated"].as_array().unwrap().iter().any(|v| v == "nabla2cond1"));
}

#[test]
fn inadmissible_theorem_is_not_a_counterexample() {
    let (code, report) = run_json("theorem", "dy_violation.toml", &["--caps", "2,2"]);
    // the hypothesis check itself is pulled in and fails
    assert_eq!(code, 1);
    assert_eq!(status(&report, "curvature-theorem"), "inadmissible");
    assert_eq!(status(&report, "product-leibniz"), "not-guaranteed");
}

#[test]
fn invalid_scenarios_exit_two() {
    let out = run(&["run", "--scenario", scenario("singular.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("S_matrix not invertible"));
    let out = run(&["run", "--scenario", scenario("missing.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_output_is_deterministic() {
    let a = run_json("run", "sign.toml", &["--caps", "2,2", "--seed", "7"]);
    let b = run_json("run", "sign.toml", &["--caps", "2,2", "--seed", "7"]);
    assert_eq!(a, b);
    assert_eq!(a.0, 0);
    assert_eq!(a.1["scenario"]["seed"], "7");
}

#[test]
fn text_output_reports_timing() {
    let path = scenario("grassmann.toml");
    let out = run(&["check-axioms", "--scenario", path.to_str().unwrap(), "--caps", "2,2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[pass] twisting-axioms"));
    assert!(text.lines().last().unwrap().starts_with("elapsed: "));
}

#[test]
fn report_subcommand_carries_symbolic_terms() {
    let (code, report) = run_json("report", "grassmann.toml", &[]);
    assert_eq!(code, 0);
    let payload = &report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["id"] == "quantum-plane-report")
        .unwrap()["payload"];
    assert_eq!(payload["sigma-term"], "1 ⊗ (q^{-1} y, q^{-2} y^2) ⊗ dx ⊗ 1");
    assert_eq!(payload["nabla2cond1"], "pass");
}

#[test]
fn bad_caps_are_rejected_by_the_parser() {
    let path = scenario("grassmann.toml");
    let out = run(&["run", "--scenario", path.to_str().unwrap(), "--caps", "0,2"]);
    assert_eq!(out.status.code(), Some(2));
}
