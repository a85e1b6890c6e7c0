//! End-to-end checks of the command-line interface: output, JSON schema
//! round-trip and exit codes.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_superflag"))
}

#[test]
fn dim_json_round_trips() {
    let out = bin()
        .args(["dim", "--space", "Gr(2|1; 1|1)", "--degree", "2", "--format", "json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let doc: superflag::solver::ReportDoc = serde_json::from_str(&text).unwrap();
    assert_eq!(doc.dimension, 8);
    assert!(doc.stabilized);
    // parse(emit(report)) = report
    let emitted = serde_json::to_string_pretty(&doc).unwrap();
    let back: superflag::solver::ReportDoc = serde_json::from_str(&emitted).unwrap();
    assert_eq!(doc, back);
}

#[test]
fn usage_errors_exit_2() {
    let out = bin().args(["dim", "--space", "not-a-space"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["verify", "no-such-suite"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn non_stabilized_dimension_exits_3() {
    // at degree 3 this space has not saturated yet (19 of 20)
    let out = bin()
        .args(["dim", "--space", "F(1|2; 0,0 | 2,1)", "--degree", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("stabilized false"), "{text}");
}

#[test]
fn verify_kernel_passes() {
    let out = bin().args(["verify", "kernel", "--space", "Gr(2|1; 1|1)"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PASS"));
    assert!(text.contains("0 failed"));
}

#[test]
fn functions_reports_grassmann_algebra() {
    let out = bin()
        .args(["functions", "--space", "Gr(1|2; 0|2)", "--degree", "2", "--basis"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("dimension 4"));
}
