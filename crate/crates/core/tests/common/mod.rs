#![allow(dead_code)]

use pdgal_core::matrix::Matrix;
use pdgal_core::ratfunc::{DiffContext, RatFunc};
use pdgal_core::sysio::{parse_matrix, parse_system, parse_tower};
use pdgal_core::system::LinSystem;
use pdgal_core::tower::Tower;

pub fn fixture(name: &str) -> String {
    let path = format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn system(name: &str) -> LinSystem {
    parse_system(&fixture(name)).unwrap()
}

pub fn tower(name: &str) -> Tower {
    parse_tower(&fixture(name)).unwrap()
}

pub fn matrix(name: &str, t: &Tower) -> Matrix {
    parse_matrix(&fixture(name), &t.ctx()).unwrap()
}

pub fn t2() -> DiffContext {
    DiffContext::new(["t1", "t2"], None).unwrap()
}

pub fn v(n: usize, i: usize) -> RatFunc {
    RatFunc::var(n, i)
}

pub fn k(n: usize, c: i64) -> RatFunc {
    RatFunc::from_int(n, c)
}
