use std::time::Instant;

use pdgal_core::system::check_integrability;
use pdgal_core::testkit::Gen;
use pdgal_core::tower::{certify_tower, solve_triangular, verify_fundamental, StepKind, TowerVerdict};

#[test]
fn random_triangular_systems_are_solved() {
    let start = Instant::now();
    let mut g = Gen::new(0x5eed_0003);
    for case in 0..100 {
        let s = g.triangular_system(2, 1 + case % 2);
        assert!(check_integrability(&s).is_integrable(), "case {case}");
        let (t, m) = solve_triangular(&s).unwrap_or_else(|e| panic!("case {case}: {e}"));
        assert!(t.steps().iter().all(|st| matches!(st.kind(), StepKind::Integral(_) | StepKind::ExpIntegral(_))));
        let v = verify_fundamental(&t, &s, &m);
        assert!(v.ok, "case {case}: {:?}", v.failures);
        assert_eq!(certify_tower(&t).verdict, TowerVerdict::Liouvillian, "case {case}");
    }
    assert!(start.elapsed().as_secs() < 60);
}

#[test]
fn non_triangular_input_is_rejected() {
    let mut g = Gen::new(7);
    let s = g.scalar_plus_constant(2);
    if !s.is_upper_triangular() {
        assert!(solve_triangular(&s).is_err());
    }
}
