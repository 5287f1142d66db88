#![allow(dead_code)]

use std::process::{Command, Output};

pub fn fixtures_dir() -> String {
    format!("{}/../../fixtures", env!("CARGO_MANIFEST_DIR"))
}

pub fn pdgal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdgal"))
        .arg("--fixtures")
        .arg(fixtures_dir())
        .args(args)
        .output()
        .expect("spawn pdgal")
}

/// Fixture corpus invocations and their documented exit codes.
pub const CORPUS: &[(&[&str], i32)] = &[
    (&["check", "exponential.pdsys"], 0),
    (&["check", "rotation.pdsys"], 0),
    (&["check", "hyperbolic.pdsys"], 0),
    (&["check", "triangular.pdsys"], 0),
    (&["check", "exponential_corrupt.pdsys"], 1),
    (&["check", "rotation_corrupt.pdsys"], 1),
    (&["check", "hyperbolic_corrupt.pdsys"], 1),
    (&["reduce", "rotation.pdsys"], 0),
    (&["verify", "exponential.pdsys", "exponential.tower", "exponential_fundamental.mat"], 0),
    (&["verify", "rotation.pdsys", "rotation.tower", "rotation_fundamental.mat"], 0),
    (&["verify", "hyperbolic.pdsys", "hyperbolic.tower", "hyperbolic_fundamental.mat"], 0),
    (&["verify", "rotation.pdsys", "rotation.tower", "rotation_fundamental_corrupt.mat"], 1),
    (&["verify", "hyperbolic.pdsys", "hyperbolic.tower", "hyperbolic_fundamental_corrupt.mat"], 1),
    (&["solve-triangular", "triangular.pdsys"], 0),
    (&["solve-triangular", "rotation.pdsys"], 1),
    (&["certify-tower", "exponential.tower"], 0),
    (&["certify-tower", "rotation.tower"], 1),
    (&["certify-tower", "log.tower"], 0),
    (&["certify-tower", "algebraic.tower"], 0),
    (&["classify", "exponential.pdsys"], 0),
    (&["classify", "exponential_reduced.pdsys"], 0),
    (&["classify", "rotation.pdsys"], 1),
    (&["classify", "hyperbolic.pdsys"], 0),
    (&["classify", "triangular.pdsys"], 0),
    (&["euler", "1"], 0),
    (&["euler", "6"], 0),
    (&["euler", "-1/2"], 1),
    (&["order-cmp", "t2", "t1"], 0),
    (&["gradient", "2", "3"], 0),
    (&["gradient", "0", "3"], 2),
    (&["parse", "rotation.tower"], 0),
    (&["parse", "malformed.pdsys"], 2),
    (&["check", "no_such_file.pdsys"], 2),
];
