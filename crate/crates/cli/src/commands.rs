use std::io::Read;
use std::path::PathBuf;

use pdgal_core::galois::{self, LiouvillianVerdict};
use pdgal_core::gradient::{self, GradientPotential};
use pdgal_core::matrix::Matrix;
use pdgal_core::ratfunc::{sign_infinitesimal, DiffContext};
use pdgal_core::scalar::Rat;
use pdgal_core::sysio::{
    parse_expr, parse_matrix, parse_system, parse_tower, render_ratfunc, serialize_matrix, serialize_reduced,
    serialize_tower, Document, DocumentKind, SourceDocument,
};
use pdgal_core::system::{check_integrability, default_u_names, kolchin_reduce_with, Integrability, LinSystem};
use pdgal_core::tower::{self, Check, StepFlags, Tower, TowerVerdict, VerifyReport};
use serde_json::{json, Value};

use crate::report::{Failure, Report};

pub struct Inputs {
    fixtures: Option<PathBuf>,
}

impl Inputs {
    pub fn new(fixtures: Option<PathBuf>) -> Self {
        Inputs { fixtures }
    }

    fn read(&self, path: &str) -> Result<String, Failure> {
        if path == "-" {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::io(path, e))?;
            return Ok(s);
        }
        let direct = PathBuf::from(path);
        let resolved = match &self.fixtures {
            Some(dir) if !direct.exists() && direct.is_relative() => dir.join(&direct),
            _ => direct,
        };
        std::fs::read_to_string(&resolved).map_err(|e| Failure::io(path, e))
    }

    fn system(&self, path: &str) -> Result<LinSystem, Failure> {
        parse_system(&self.read(path)?).map_err(|e| Failure::parse(path, e))
    }

    fn tower(&self, path: &str) -> Result<Tower, Failure> {
        parse_tower(&self.read(path)?).map_err(|e| Failure::parse(path, e))
    }
}

fn render_matrix(m: &Matrix, names: &[String]) -> Vec<String> {
    (0..m.nrows())
        .map(|i| format!("[{}]", m.row(i).iter().map(|e| render_ratfunc(e, names)).collect::<Vec<_>>().join(", ")))
        .collect()
}

fn indent(lines: &[String]) -> String {
    lines.iter().map(|l| format!("  {l}\n")).collect()
}

pub fn check(io: &Inputs, path: &str) -> Result<Report, Failure> {
    let s = io.system(path)?;
    let names = s.ctx().vars().to_vec();
    Ok(match check_integrability(&s) {
        Integrability::Integrable => {
            Report::new("check", "integrable\n".into(), json!({ "integrable": true, "rank": s.rank() }), true)
        }
        Integrability::Witness { i, j, residual } => {
            let rows = render_matrix(&residual, &names);
            let text = format!("not integrable: derivations ({}, {}) fail\nresidual:\n{}", i + 1, j + 1, indent(&rows));
            let json = json!({ "integrable": false, "rank": s.rank(), "witness": { "i": i + 1, "j": j + 1, "residual": rows } });
            Report::new("check", text, json, false)
        }
    })
}

pub fn reduce(io: &Inputs, path: &str, u_names: Option<&[String]>) -> Result<Report, Failure> {
    let s = io.system(path)?;
    let names = match u_names {
        Some(n) if n.len() != s.derivation_count() => {
            return Err(Failure::usage(format!("expected {} u names, got {}", s.derivation_count(), n.len())))
        }
        Some(n) => n.to_vec(),
        None => default_u_names(s.derivation_count()),
    };
    let r = kolchin_reduce_with(&s, &names).map_err(|e| Failure::usage(e.to_string()))?;
    let text = serialize_reduced(&r);
    let json = json!({ "reduced": text, "u_names": r.u_names() });
    Ok(Report::new("reduce", text, json, true))
}

fn verify_json(t: &Tower, v: &VerifyReport) -> Value {
    let names = t.names();
    json!({
        "ok": v.ok,
        "problem": v.problem,
        "det": v.det.as_ref().map(|d| render_ratfunc(d, names)),
        "det_nonzero": v.det_nonzero,
        "failures": v.failures.iter().map(|f| json!({
            "derivation": f.derivation + 1,
            "row": f.row + 1,
            "col": f.col + 1,
            "lhs": render_ratfunc(&f.lhs, names),
            "rhs": render_ratfunc(&f.rhs, names),
        })).collect::<Vec<_>>(),
        "new_constants": v.new_constants,
    })
}

fn verify_text(t: &Tower, v: &VerifyReport) -> String {
    let names = t.names();
    let mut out = String::new();
    if let Some(p) = &v.problem {
        out.push_str(&format!("rejected: {p}\n"));
        return out;
    }
    out.push_str(if v.ok { "fundamental matrix verified\n" } else { "verification failed\n" });
    if let Some(d) = &v.det {
        out.push_str(&format!("det = {}{}\n", render_ratfunc(d, names), if v.det_nonzero { "" } else { " (zero)" }));
    }
    for f in &v.failures {
        out.push_str(&format!(
            "  d{} entry ({}, {}): {} != {}\n",
            f.derivation + 1,
            f.row + 1,
            f.col + 1,
            render_ratfunc(&f.lhs, names),
            render_ratfunc(&f.rhs, names)
        ));
    }
    if !v.new_constants.is_empty() {
        out.push_str(&format!("new constants: {}\n", v.new_constants.join(", ")));
    }
    out
}

pub fn verify(io: &Inputs, system: &str, tower_path: &str, matrix: &str) -> Result<Report, Failure> {
    let s = io.system(system)?;
    let t = io.tower(tower_path)?;
    let m = parse_matrix(&io.read(matrix)?, &t.ctx()).map_err(|e| Failure::parse(matrix, e))?;
    let v = tower::verify_fundamental(&t, &s, &m);
    Ok(Report::new("verify", verify_text(&t, &v), verify_json(&t, &v), v.ok))
}

pub fn solve_triangular(io: &Inputs, path: &str) -> Result<Report, Failure> {
    let s = io.system(path)?;
    match tower::solve_triangular(&s) {
        Err(e) => {
            let text = format!("not solved: {e}\n");
            Ok(Report::new("solve-triangular", text, json!({ "solved": false, "reason": e.to_string() }), false))
        }
        Ok((t, m)) => {
            let v = tower::verify_fundamental(&t, &s, &m);
            let tower_text = serialize_tower(&t);
            let matrix_text = serialize_matrix(&m, t.names());
            let text = format!("tower:\n{}fundamental matrix:\n{}{}", indent_block(&tower_text), indent_block(&matrix_text), verify_text(&t, &v));
            let json = json!({
                "solved": true,
                "tower": tower_text,
                "matrix": matrix_text,
                "verification": verify_json(&t, &v),
            });
            Ok(Report::new("solve-triangular", text, json, v.ok))
        }
    }
}

fn indent_block(s: &str) -> String {
    s.lines().map(|l| format!("  {l}\n")).collect()
}

fn check_str(c: Check) -> &'static str {
    c.as_str()
}

fn flags_json(f: &StepFlags) -> Value {
    json!({
        "nonderivative": check_str(f.nonderivative),
        "vector_exact": f.vector_exact,
        "irreducibility": check_str(f.irreducibility),
        "zero_components": f.zero_components.iter().map(|k| k + 1).collect::<Vec<_>>(),
    })
}

pub fn certify_tower(io: &Inputs, path: &str) -> Result<Report, Failure> {
    let t = io.tower(path)?;
    let c = tower::certify_tower(&t);
    let mut text = format!("verdict: {}\n", c.verdict);
    for s in &c.steps {
        text.push_str(&format!("  {}: {} ({})\n", s.names.join(", "), s.kind, s.note));
    }
    let json = json!({
        "verdict": c.verdict.to_string(),
        "steps": c.steps.iter().map(|s| json!({
            "names": s.names,
            "kind": s.kind,
            "note": s.note,
            "flags": flags_json(&s.flags),
        })).collect::<Vec<_>>(),
    });
    let ok = !matches!(c.verdict, TowerVerdict::NotCertified(_));
    Ok(Report::new("certify-tower", text, json, ok))
}

pub fn classify(io: &Inputs, path: &str) -> Result<Report, Failure> {
    let s = io.system(path)?;
    Ok(match galois::classify(&s) {
        Err(e) => Report::new("classify", format!("{e}\n"), json!({ "integrable": false, "reason": e.to_string() }), false),
        Ok(g) => {
            let verdict = galois::liouvillian_verdict(&g);
            let mut text = format!("group: {}\nverdict: {}\n", g.descriptor, verdict);
            for f in &g.flags {
                text.push_str(&format!("assumption: {f}\n"));
            }
            let json = json!({
                "integrable": true,
                "descriptor": g.descriptor.to_string(),
                "solvable": g.solvable(),
                "real_split": g.real_split(),
                "verdict": verdict.to_string(),
                "flags": g.flags,
            });
            Report::new("classify", text, json, verdict == LiouvillianVerdict::GeneralisedLiouvillian)
        }
    })
}

fn rational_arg(text: &str) -> Result<Rat, Failure> {
    let ctx = DiffContext::new(Vec::<String>::new(), None).expect("empty context");
    let v = parse_expr(text, &ctx).map_err(|e| Failure::parse("argument", e))?;
    v.as_constant()
        .and_then(|c| c.to_rat().cloned())
        .ok_or_else(|| Failure::usage(format!("`{text}` is not a rational number")))
}

pub fn euler(c: &str) -> Result<Report, Failure> {
    let c = rational_arg(c)?;
    let e = galois::classify_euler(&c);
    let verdict = galois::liouvillian_verdict(&e.class);
    let roots: Option<Vec<String>> = e.roots.as_ref().map(|(a, b)| vec![a.to_string(), b.to_string()]);
    let mut text = format!("equation: x^2 y'' = {c} y\ndiscriminant: {}\n", e.discriminant);
    match &roots {
        Some(r) => text.push_str(&format!("exponents: {}, {}\n", r[0], r[1])),
        None => text.push_str("exponents: complex\n"),
    }
    text.push_str(&format!("solutions: {}\n", e.solutions.join(", ")));
    if let Some(rel) = &e.relation {
        text.push_str(&format!("relation: {rel}\n"));
    }
    text.push_str(&format!("group: {}\nverdict: {verdict}\n", e.class.descriptor));
    let json = json!({
        "c": c.to_string(),
        "discriminant": e.discriminant.to_string(),
        "exponents": roots,
        "solutions": e.solutions,
        "relation": e.relation,
        "descriptor": e.class.descriptor.to_string(),
        "flags": e.class.flags,
        "verdict": verdict.to_string(),
    });
    Ok(Report::new("euler", text, json, verdict == LiouvillianVerdict::GeneralisedLiouvillian))
}

/// Identifiers in order, `t1 < t2 < t10` by embedded number.
fn infer_vars(texts: &[&str]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for t in texts {
        let mut cur = String::new();
        for ch in t.chars().chain(std::iter::once(' ')) {
            if ch.is_ascii_alphanumeric() || ch == '_' || ch == '\'' {
                cur.push(ch);
            } else {
                if cur.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_') && cur != "sqrt" && !out.contains(&cur) {
                    out.push(cur.clone());
                }
                cur.clear();
            }
        }
    }
    let key = |s: &String| {
        let digits: String = s.chars().rev().take_while(char::is_ascii_digit).collect::<Vec<_>>().into_iter().rev().collect();
        let stem = s[..s.len() - digits.len()].to_string();
        (stem, digits.parse::<u64>().unwrap_or(0), s.clone())
    };
    out.sort_by_key(key);
    out
}

pub fn order_cmp(f: &str, g: &str, vars: Option<&[String]>) -> Result<Report, Failure> {
    let names = vars.map(<[String]>::to_vec).unwrap_or_else(|| infer_vars(&[f, g]));
    let ctx = DiffContext::new(names.clone(), None).map_err(|e| Failure::usage(e.to_string()))?;
    let fv = parse_expr(f, &ctx).map_err(|e| Failure::parse("f", e))?;
    let gv = parse_expr(g, &ctx).map_err(|e| Failure::parse("g", e))?;
    let sign = sign_infinitesimal(&(&fv - &gv));
    let rel = match sign {
        -1 => "<",
        0 => "=",
        _ => ">",
    };
    let text = format!("{f} {rel} {g}\n");
    let json = json!({ "f": f, "g": g, "vars": names, "sign": sign, "relation": rel });
    Ok(Report::new("order-cmp", text, json, true))
}

pub const CURVATURE_LADDER: [f64; 4] = [1e-2, 1e-4, 1e-6, 1e-8];

pub fn gradient(lambda: i64, mu: i64, value: &str) -> Result<Report, Failure> {
    let p = GradientPotential::new(lambda, mu).map_err(|e| Failure::usage(e.to_string()))?;
    let v = rational_arg(value)?;
    if num_is_zero(&v) {
        return Err(Failure::usage("level value must be nonzero"));
    }
    let names = gradient::plane().vars().to_vec();
    let s = gradient::gradient_system(&p);
    let diag: Vec<String> = (0..2).map(|i| render_ratfunc(s.matrix(0).get(i, i), &["t".to_string()])).collect();
    let i = gradient::first_integral(&p);
    let lie = gradient::lie_derivative(&p, &i);
    let certified = lie.is_zero();
    let curve = gradient::level_curve(&p, &v);
    let samples = gradient::curvature_samples(&CURVATURE_LADDER).expect("positive ladder");
    let integral = render_ratfunc(&i, &names);
    let mut text = format!(
        "potential: {lambda}*x^2 + {mu}*y^2\nsystem: dx/dt = {}*x, dy/dt = {}*y\nfirst integral: {integral}\nlie derivative: {}\ncertified: {certified}\nlevel curve ({v}): {curve}\ncusp: {}\n",
        diag[0],
        diag[1],
        render_ratfunc(&lie, &names),
        curve.cusp
    );
    text.push_str("curvature of y = x^(3/2) (approximate):\n");
    for (x, k) in &samples {
        text.push_str(&format!("  x = {x:e}  kappa = {k:.6e}  kappa*sqrt(x) = {:.6}\n", k * x.sqrt()));
    }
    let json = json!({
        "lambda": lambda,
        "mu": mu,
        "system_diagonal": diag,
        "first_integral": integral,
        "lie_derivative": render_ratfunc(&lie, &names),
        "certified": certified,
        "level_value": v.to_string(),
        "level_curve": curve.to_string(),
        "cusp": curve.cusp,
        "curvature_approximate": samples.iter().map(|(x, k)| json!({ "x": x, "kappa": k })).collect::<Vec<_>>(),
    });
    Ok(Report::new("gradient", text, json, certified))
}

fn num_is_zero(r: &Rat) -> bool {
    r.numer() == &0.into()
}

pub fn parse(io: &Inputs, path: &str, vars: Option<&[String]>) -> Result<Report, Failure> {
    let text = io.read(path)?;
    let src = SourceDocument::new(text);
    let kind = src.kind;
    let summary = if kind == DocumentKind::Matrix {
        let Some(vars) = vars else {
            return Err(Failure::usage("bare matrix files need --vars"));
        };
        let ctx = DiffContext::new(vars.to_vec(), None).map_err(|e| Failure::usage(e.to_string()))?;
        let m = parse_matrix(&src.text, &ctx).map_err(|e| Failure::parse(path, e))?;
        format!("{}x{} matrix", m.nrows(), m.ncols())
    } else {
        match src.parse().map_err(|e| Failure::parse(path, e))? {
            Document::System(s) => format!("rank {} system in {} derivation(s)", s.rank(), s.derivation_count()),
            Document::Reduced(r) => format!("rank {} reduced system over {} variable(s)", r.a_d().nrows(), r.m()),
            Document::Tower(t) => format!("tower with {} step(s)", t.steps().len()),
        }
    };
    let text = format!("ok: {} ({summary})\n", kind.as_str());
    Ok(Report::new("parse", text, json!({ "ok": true, "kind": kind.as_str(), "summary": summary }), true))
}
