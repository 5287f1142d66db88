//! One line per acceptance criterion. Run with `--nocapture` to see the table.

mod common;

use std::time::{Duration, Instant};

use pdgal_core::galois::{classify, classify_euler, liouvillian_verdict, Descriptor, LiouvillianVerdict};
use pdgal_core::gradient::{certify_first_integral, curvature, first_integral, level_curve, lie_derivative, GradientPotential};
use pdgal_core::matrix::Matrix;
use pdgal_core::ratfunc::{derive, is_derivative_univariate, sign_infinitesimal, RatFunc};
use pdgal_core::scalar::{rat, rat_int, QuadScalar};
use pdgal_core::sysio::{parse_matrix, parse_system, parse_tower};
use pdgal_core::system::{check_integrability, kolchin_reduce, Integrability, LinSystem};
use pdgal_core::testkit::Gen;
use pdgal_core::tower::{
    certify_tower, determinant, fixed_subfield_power, kolchin_holds, solve_triangular, verify_fundamental, StepKind, Tower,
    TowerVerdict,
};

type Check = Result<(), String>;

fn ensure(cond: bool, what: impl Into<String>) -> Check {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn read(name: &str) -> Result<String, String> {
    std::fs::read_to_string(format!("{}/{name}", common::fixtures_dir())).map_err(|e| format!("{name}: {e}"))
}

fn system(name: &str) -> Result<LinSystem, String> {
    parse_system(&read(name)?).map_err(|e| format!("{name}: {e}"))
}

fn tower(name: &str) -> Result<Tower, String> {
    parse_tower(&read(name)?).map_err(|e| format!("{name}: {e}"))
}

fn matrix(name: &str, t: &Tower) -> Result<Matrix, String> {
    parse_matrix(&read(name)?, &t.ctx()).map_err(|e| format!("{name}: {e}"))
}

fn timed(limit: Duration, what: &str, f: impl FnOnce() -> Check) -> Check {
    let start = Instant::now();
    f()?;
    ensure(start.elapsed() < limit, format!("{what} took {:?}", start.elapsed()))
}

fn worked_examples() -> Check {
    let second = Duration::from_secs(1);
    timed(second, "integrability", || {
        for name in ["exponential.pdsys", "rotation.pdsys", "hyperbolic.pdsys"] {
            ensure(check_integrability(&system(name)?).is_integrable(), format!("{name} not integrable"))?;
        }
        for name in ["exponential_corrupt.pdsys", "rotation_corrupt.pdsys", "hyperbolic_corrupt.pdsys"] {
            match check_integrability(&system(name)?) {
                Integrability::Witness { residual, .. } => ensure(!residual.is_zero(), format!("{name} zero witness"))?,
                Integrability::Integrable => return Err(format!("{name} accepted")),
            }
        }
        Ok(())
    })?;
    timed(second, "fundamental matrices", || {
        for (sys, tw, good, bad, sign) in [
            ("rotation.pdsys", "rotation.tower", "rotation_fundamental.mat", "rotation_fundamental_corrupt.mat", 1),
            ("hyperbolic.pdsys", "hyperbolic.tower", "hyperbolic_fundamental.mat", "hyperbolic_fundamental_corrupt.mat", -1),
        ] {
            let (s, t) = (system(sys)?, tower(tw)?);
            let m = matrix(good, &t)?;
            ensure(verify_fundamental(&t, &s, &m).ok, format!("{good} rejected"))?;
            let x = RatFunc::var(t.nvars(), 0);
            let want = (&x * &x).scale(&QuadScalar::from_int(sign));
            ensure(t.equals(&determinant(&t, &m), &want), format!("{good} determinant"))?;
            ensure(!verify_fundamental(&t, &s, &matrix(bad, &t)?).ok, format!("{bad} accepted"))?;
        }
        Ok(())
    })?;
    timed(second, "classification", || {
        let rot = classify(&system("rotation.pdsys")?).map_err(|e| e.to_string())?;
        ensure(rot.descriptor.has_non_split(), format!("rotation is {}", rot.descriptor))?;
        ensure(liouvillian_verdict(&rot) == LiouvillianVerdict::NotGeneralisedLiouvillian, "rotation verdict")?;
        let hyp = classify(&system("hyperbolic.pdsys")?).map_err(|e| e.to_string())?;
        ensure(hyp.real_split(), format!("hyperbolic is {}", hyp.descriptor))?;
        ensure(liouvillian_verdict(&hyp) == LiouvillianVerdict::GeneralisedLiouvillian, "hyperbolic verdict")?;
        let expo = classify(&system("exponential.pdsys")?).map_err(|e| e.to_string())?;
        ensure(expo.descriptor == Descriptor::SplitTorus(1), format!("exponential is {}", expo.descriptor))
    })?;
    timed(second, "euler", || {
        let e = classify_euler(&rat_int(1));
        ensure(e.class.descriptor == Descriptor::SplitTorus(1), "euler(1) class")?;
        let (r1, r2) = e.roots.ok_or("euler(1) roots")?;
        let s5 = QuadScalar::sqrt_int(&5u32.into());
        let half = rat(1, 2);
        ensure(r1 == (&QuadScalar::one() + &s5).scale(&half), "euler(1) first root")?;
        ensure(r2 == (&QuadScalar::one() - &s5).scale(&half), "euler(1) second root")?;
        ensure(&r1 + &r2 == QuadScalar::one() && &r1 * &r2 == QuadScalar::from_int(-1), "euler(1) relation")?;
        ensure(classify_euler(&rat_int(6)).class.descriptor == Descriptor::Trivial, "euler(6)")?;
        ensure(classify_euler(&rat(-1, 2)).class.descriptor.has_non_split(), "euler(-1/2)")
    })?;
    timed(second, "gradient", || {
        let p = GradientPotential::new(2, 3).map_err(|e| e.to_string())?;
        let i = first_integral(&p);
        let (x, y) = (RatFunc::var(2, 0), RatFunc::var(2, 1));
        ensure(i.equals(&(&x.pow(3) / &y.pow(2))), "first integral")?;
        ensure(lie_derivative(&p, &i).is_zero() && certify_first_integral(&p, &i), "certificate")?;
        let c = level_curve(&p, &rat_int(1));
        ensure(c.to_string() == "y^2 = x^3" && c.cusp, format!("level curve {c}"))
    })?;
    timed(second, "power subfield", || {
        let f = fixed_subfield_power(&tower("exponential.tower")?, 3).map_err(|e| e.to_string())?;
        let (t1, t2) = (RatFunc::var(2, 0), RatFunc::var(2, 1));
        let three = QuadScalar::from_int(3);
        match f.steps().first().map(|s| s.kind()) {
            Some(StepKind::ExpIntegral(c)) if f.steps().len() == 1 => {
                ensure(c[0].equals(&t2.scale(&three)) && c[1].equals(&t1.scale(&three)), "power subfield coefficients")
            }
            other => Err(format!("power subfield step {other:?}")),
        }
    })
}

/// `sum_k u_k A_k` built entry by entry.
fn combined(s: &LinSystem) -> Matrix {
    let m = s.derivation_count();
    let n = 2 * m;
    let r = s.rank();
    let rows = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| {
                    s.matrices().iter().enumerate().fold(RatFunc::zero(n), |acc, (k, a)| {
                        &acc + &(&RatFunc::var(n, m + k) * &a.get(i, j).pad_vars(n))
                    })
                })
                .collect()
        })
        .collect();
    Matrix::from_rows(rows).expect("square")
}

fn kolchin_suite() -> Check {
    timed(Duration::from_secs(30), "kolchin suite", || {
        let mut cases = Vec::new();
        for (sys, tw, mat) in [
            ("exponential.pdsys", "exponential.tower", "exponential_fundamental.mat"),
            ("rotation.pdsys", "rotation.tower", "rotation_fundamental.mat"),
            ("hyperbolic.pdsys", "hyperbolic.tower", "hyperbolic_fundamental.mat"),
        ] {
            let t = tower(tw)?;
            let m = matrix(mat, &t)?;
            cases.push((sys.to_string(), system(sys)?, t, m));
        }
        let mut g = Gen::new(0xacce_0002);
        for case in 0..100 {
            let s = g.triangular_system(2, 1 + case % 2);
            let (t, m) = solve_triangular(&s).map_err(|e| format!("case {case}: {e}"))?;
            cases.push((format!("case {case}"), s, t, m));
        }
        for (name, s, t, m) in &cases {
            ensure(verify_fundamental(t, s, m).ok, format!("{name}: not fundamental"))?;
            let r = kolchin_reduce(s).map_err(|e| format!("{name}: {e}"))?;
            ensure(r.a_d().equals(&combined(s)), format!("{name}: A_D"))?;
            ensure(kolchin_holds(t, s, m), format!("{name}: D M != A_D M"))?;
        }
        Ok(())
    })
}

fn triangular_suite() -> Check {
    timed(Duration::from_secs(60), "triangular suite", || {
        let mut g = Gen::new(0xacce_0003);
        for case in 0..100 {
            let s = g.triangular_system(2, 1 + case % 2);
            let (t, m) = solve_triangular(&s).map_err(|e| format!("case {case}: {e}"))?;
            let quadratures = t.steps().iter().all(|st| matches!(st.kind(), StepKind::Integral(_) | StepKind::ExpIntegral(_)));
            ensure(quadratures, format!("case {case}: non-quadrature step"))?;
            ensure(verify_fundamental(&t, &s, &m).ok, format!("case {case}: not fundamental"))?;
            ensure(certify_tower(&t).verdict == TowerVerdict::Liouvillian, format!("case {case}: not Liouvillian"))?;
        }
        Ok(())
    })
}

fn property_suites() -> Check {
    const CASES: u64 = 200;
    let mut g = Gen::new(0xacce_0004);
    for case in 0..CASES {
        let f = g.ratfunc(3);
        let h = g.ratfunc(3);
        for i in 0..3 {
            for j in 0..3 {
                ensure(derive(&derive(&f, i), j).equals(&derive(&derive(&f, j), i)), format!("commute {case}"))?;
            }
            let leibniz = &(&derive(&f, i) * &h) + &(&f * &derive(&h, i));
            ensure(derive(&(&f * &h), i).equals(&leibniz), format!("leibniz {case}"))?;
        }
        let (sf, sh) = (sign_infinitesimal(&f), sign_infinitesimal(&h));
        ensure(sign_infinitesimal(&-f.clone()) == -sf, format!("negation {case}"))?;
        ensure(sign_infinitesimal(&(&f * &h)) == sf * sh, format!("product sign {case}"))?;
        ensure(!(sf > 0 && sh > 0) || sign_infinitesimal(&(&f + &h)) == 1, format!("sum sign {case}"))?;
        let sq = sign_infinitesimal(&(&f * &f));
        ensure(sq >= 0 && (sq == 0) == f.is_zero(), format!("square {case}"))?;
        let c = RatFunc::constant(3, QuadScalar::from_rat(rat(g.int(1, 1000), g.int(1, 1_000_000))));
        for i in 0..3 {
            let ti = RatFunc::var(3, i);
            ensure(sign_infinitesimal(&(&c - &ti)) == 1, format!("t{} below constants {case}", i + 1))?;
            if i < 2 {
                ensure(sign_infinitesimal(&(&ti - &RatFunc::var(3, i + 1))) == 1, format!("nesting {case}"))?;
            }
        }
        let u = RatFunc::new(g.poly(1, 3, 3), g.nonzero_poly(1, 2, 2));
        let d = derive(&u, 0);
        ensure(is_derivative_univariate(&d, 0) == Ok(true), format!("hermite derivative {case}"))?;
        let log = &d + &RatFunc::var(1, 0).inv();
        ensure(is_derivative_univariate(&log, 0) == Ok(false), format!("hermite log {case}"))?;
        let t = g.tower(2, 4);
        for p in t.relation_polys() {
            for i in 0..t.derivation_count() {
                ensure(t.is_zero(&t.derive_elem(&p, i)), format!("tower relation {case}"))?;
            }
        }
        let s = g.scalar_plus_constant(2);
        let r = kolchin_reduce(&s).map_err(|e| e.to_string())?.to_system();
        let (a, b) = (classify(&s).map_err(|e| e.to_string())?, classify(&r).map_err(|e| e.to_string())?);
        ensure(a == b, format!("classifier agreement {case}: {} vs {}", a.descriptor, b.descriptor))?;
    }
    Ok(())
}

fn curvature_blow_up() -> Check {
    timed(Duration::from_secs(1), "curvature", || {
        let ladder = [1e-2, 1e-4, 1e-6, 1e-8];
        let k: Vec<f64> = ladder.iter().map(|&x| curvature(x)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
        let scaled = k[3] * 1e-8f64.sqrt();
        ensure((scaled - 0.75).abs() <= 0.0075, format!("kappa sqrt(x) = {scaled}"))?;
        ensure(k.windows(2).all(|w| w[1] > w[0]), format!("not increasing: {k:?}"))
    })
}

fn cli_contract() -> Check {
    for (args, code) in common::CORPUS {
        let out = common::pdgal(args);
        ensure(out.status.code() == Some(*code), format!("{args:?} exited {:?}", out.status.code()))?;
        let mut full = vec!["--json"];
        full.extend_from_slice(args);
        let (a, b) = (common::pdgal(&full), common::pdgal(&full));
        ensure(a.stdout == b.stdout, format!("{args:?} reports differ"))?;
        ensure(a.status.code() == Some(*code), format!("{args:?} --json exited {:?}", a.status.code()))?;
    }
    Ok(())
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Check); 6] = [
        ("worked examples are exact", worked_examples),
        ("kolchin reduction instances", kolchin_suite),
        ("triangular solver soundness", triangular_suite),
        ("property suites", property_suites),
        ("curvature blow-up", curvature_blow_up),
        ("cli contract", cli_contract),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match &outcome {
            Ok(()) => println!("criterion {}: PASS {name} ({secs:.2}s)", i + 1),
            Err(why) => {
                println!("criterion {}: FAIL {name} ({secs:.2}s): {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
