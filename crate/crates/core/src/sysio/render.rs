use crate::poly::MultiPoly;
use crate::ratfunc::RatFunc;
use crate::scalar::QuadScalar;

fn monomial(e: &[u32], names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &k) in e.iter().enumerate() {
        match k {
            0 => {}
            1 => parts.push(names[i].clone()),
            _ => parts.push(format!("{}^{}", names[i], k)),
        }
    }
    parts.join("*")
}

fn term(e: &[u32], c: &QuadScalar, names: &[String]) -> String {
    let m = monomial(e, names);
    if m.is_empty() {
        return c.to_string();
    }
    if !c.is_rational() {
        return format!("({c})*{m}");
    }
    if c.is_one() {
        m
    } else if (-c).is_one() {
        format!("-{m}")
    } else {
        format!("{c}*{m}")
    }
}

/// Renders a polynomial in the expression grammar, highest terms first.
pub fn render_poly(p: &MultiPoly, names: &[String]) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (e, c)) in p.terms().rev().enumerate() {
        let t = term(e, c, names);
        if i == 0 {
            out.push_str(&t);
        } else if let Some(rest) = t.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(&t);
        }
    }
    out
}

fn is_atomic(p: &MultiPoly, s: &str) -> bool {
    p.len() == 1 && !s.contains(['*', '/', ' ']) && !s.starts_with('-')
}

/// Renders `f` so that parsing the output over the same names gives back an
/// equal value.
pub fn render_ratfunc(f: &RatFunc, names: &[String]) -> String {
    let num = render_poly(f.num(), names);
    if f.den().is_one() {
        return num;
    }
    let den = render_poly(f.den(), names);
    let num = if f.num().len() == 1 && !num.contains(' ') { num } else { format!("({num})") };
    let den = if is_atomic(f.den(), &den) { den } else { format!("({den})") };
    format!("{num}/{den}")
}
