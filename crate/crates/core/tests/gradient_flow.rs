use proptest::prelude::*;

use pdgal_core::gradient::{certify_first_integral, curvature_samples, first_integral, level_curve, lie_derivative, GradientPotential};
use pdgal_core::ratfunc::RatFunc;
use pdgal_core::scalar::rat_int;

fn nonzero() -> impl Strategy<Value = i64> {
    (-5i64..=5).prop_filter("nonzero", |v| *v != 0)
}

/// `x^a y^b` with integer exponents.
fn monomial(a: i32, b: i32) -> RatFunc {
    &RatFunc::var(2, 0).pow(a) * &RatFunc::var(2, 1).pow(b)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn first_integral_is_certified(l in nonzero(), m in nonzero()) {
        let p = GradientPotential::new(l, m).unwrap();
        let i = first_integral(&p);
        prop_assert!(certify_first_integral(&p, &i));
        prop_assert!(certify_first_integral(&p, &i.pow(2)));
        prop_assert!(certify_first_integral(&p, &i.pow(3)));
    }

    #[test]
    fn lie_derivative_of_monomials(l in nonzero(), m in nonzero(), a in -4i32..=4, b in -4i32..=4) {
        // 2 lambda x d/dx + 2 mu y d/dy scales x^a y^b by 2 lambda a + 2 mu b
        let p = GradientPotential::new(l, m).unwrap();
        let f = monomial(a, b);
        let want = f.scale(&pdgal_core::scalar::QuadScalar::from_int(2 * l * a as i64 + 2 * m * b as i64));
        prop_assert!(lie_derivative(&p, &f).equals(&want));
        prop_assert_eq!(certify_first_integral(&p, &f), l * a as i64 + m * b as i64 == 0);
    }

    #[test]
    fn scaling_preserves_the_integral(l in nonzero(), m in nonzero(), k in 1i64..=4) {
        let p = GradientPotential::new(l, m).unwrap();
        let q = GradientPotential::new(k * l, k * m).unwrap();
        let i = first_integral(&q);
        prop_assert!(certify_first_integral(&p, &i));
        prop_assert!(certify_first_integral(&q, &first_integral(&p)));
    }
}

#[test]
fn zero_coefficients_are_rejected() {
    assert!(GradientPotential::new(0, 3).is_err());
    assert!(GradientPotential::new(2, 0).is_err());
}

#[test]
fn level_curves_at_other_values() {
    let p = GradientPotential::new(2, 3).unwrap();
    assert_eq!(level_curve(&p, &rat_int(2)).to_string(), "2*y^2 = x^3");
}

#[test]
fn curvature_rejects_non_positive_samples() {
    assert!(curvature_samples(&[1e-2, 0.0]).is_err());
    assert!(curvature_samples(&[-1.0]).is_err());
    let s = curvature_samples(&[1.0]).unwrap();
    // 0.75 / 3.25^1.5
    assert!((s[0].1 - 0.75 / 3.25f64.powf(1.5)).abs() < 1e-12);
}
