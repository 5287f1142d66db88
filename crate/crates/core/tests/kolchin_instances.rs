mod common;

use std::time::Instant;

use common::{matrix, system, tower};
use pdgal_core::matrix::Matrix;
use pdgal_core::ratfunc::RatFunc;
use pdgal_core::system::{kolchin_reduce, LinSystem};
use pdgal_core::testkit::Gen;
use pdgal_core::tower::{kolchin_holds, solve_triangular, verify_fundamental, Tower};

/// `sum_k u_k A_k` assembled entry by entry.
fn combined(s: &LinSystem) -> Matrix {
    let m = s.derivation_count();
    let n = 2 * m;
    let r = s.rank();
    let rows = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| {
                    let mut acc = RatFunc::zero(n);
                    for (k, a) in s.matrices().iter().enumerate() {
                        acc = &acc + &(&RatFunc::var(n, m + k) * &a.get(i, j).pad_vars(n));
                    }
                    acc
                })
                .collect()
        })
        .collect();
    Matrix::from_rows(rows).unwrap()
}

fn check_instance(s: &LinSystem, t: &Tower, m: &Matrix) {
    assert!(verify_fundamental(t, s, m).ok);
    let r = kolchin_reduce(s).unwrap();
    assert!(r.a_d().equals(&combined(s)));
    assert!(kolchin_holds(t, s, m));
}

#[test]
fn reference_systems_reduce() {
    for (sys, tw, mat) in [
        ("exponential.pdsys", "exponential.tower", "exponential_fundamental.mat"),
        ("rotation.pdsys", "rotation.tower", "rotation_fundamental.mat"),
        ("hyperbolic.pdsys", "hyperbolic.tower", "hyperbolic_fundamental.mat"),
    ] {
        let t = tower(tw);
        check_instance(&system(sys), &t, &matrix(mat, &t));
    }
}

#[test]
fn corrupted_matrix_fails_reduced_identity() {
    let t = tower("rotation.tower");
    let m = matrix("rotation_fundamental_corrupt.mat", &t);
    assert!(!kolchin_holds(&t, &system("rotation.pdsys"), &m));
}

#[test]
fn random_triangular_systems_reduce() {
    let start = Instant::now();
    let mut g = Gen::new(0x5eed_0002);
    for case in 0..100 {
        let r = 1 + case % 2;
        let s = g.triangular_system(2, r);
        let (t, m) = solve_triangular(&s).unwrap_or_else(|e| panic!("case {case}: {e}"));
        check_instance(&s, &t, &m);
    }
    assert!(start.elapsed().as_secs() < 30);
}
