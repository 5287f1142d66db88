mod common;

use common::{pdgal, CORPUS};
use serde_json::Value;

#[test]
fn corpus_exit_codes() {
    for (args, code) in CORPUS {
        let out = pdgal(args);
        assert_eq!(out.status.code(), Some(*code), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn json_reports_are_byte_identical() {
    for (args, _) in CORPUS {
        let mut full = vec!["--json"];
        full.extend_from_slice(args);
        let a = pdgal(&full);
        let b = pdgal(&full);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert!(!a.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn json_reports_carry_exit_code() {
    for (args, code) in CORPUS {
        let mut full = vec!["--json"];
        full.extend_from_slice(args);
        let out = pdgal(&full);
        let doc: Value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}"));
        assert_eq!(doc["exit_code"], Value::from(*code), "{args:?}");
        if *code == 2 {
            assert!(doc["error"]["message"].is_string());
        } else {
            assert_eq!(doc["command"], Value::from(args[0]));
        }
    }
}

#[test]
fn parse_errors_report_position() {
    let out = pdgal(&["--json", "parse", "malformed.pdsys"]);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["error"]["kind"], "parse");
    assert!(doc["error"]["line"].as_u64().unwrap() >= 1);
    let text = pdgal(&["parse", "malformed.pdsys"]);
    assert!(String::from_utf8_lossy(&text.stderr).starts_with("error: "));
}

#[test]
fn stdin_input() {
    use std::io::Write;
    use std::process::{Command, Stdio};
    let src = std::fs::read(format!("{}/hyperbolic.pdsys", common::fixtures_dir())).unwrap();
    let mut child = Command::new(env!("CARGO_BIN_EXE_pdgal"))
        .args(["check", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(&src).unwrap();
    assert_eq!(child.wait_with_output().unwrap().status.code(), Some(0));
}

#[test]
fn gradient_report_text() {
    let out = pdgal(&["gradient", "2", "3"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("y^2 = x^3"), "{text}");
}
