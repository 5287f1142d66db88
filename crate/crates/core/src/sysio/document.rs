//! Line-oriented documents: systems (`.pdsys`), reduced systems, towers
//! (`.tower`) and bare matrices.
//!
//! ```text
//! # system
//! vars: t1, t2
//! sqrt: 5                 # optional
//! rank: 2
//! matrix t1:
//!   [1/t1, 0]
//!   [0, 1/t1]
//! matrix t2:
//!   [0, 1]
//!   [-1, 0]
//!
//! # reduced system
//! vars: t1, t2
//! kolchin: u1, u2
//! rank: 1
//! matrix D:
//!   [u1*t2 + u2*t1]
//!
//! # tower
//! base: t1, t2
//! step E: expintegral [t2, t1]
//! step s, c: rotationpair [0, 1]
//! step a: algebraic a^2 - t1
//! relation c^2 + s^2 - 1
//! ```
//!
//! A tower may declare `kolchin: u1, u2` to sit over `K(u)` with the single
//! derivation `D`. Relation lines are checked against the tower on reading.

use num_bigint::BigUint;
use num_traits::One;

use super::{is_identifier, parse_at, render_ratfunc, ParseError, ParseErrorKind};
use crate::matrix::Matrix;
use crate::ratfunc::{DiffContext, RatFunc};
use crate::scalar::squarefree_decompose;
use crate::system::{Derivations, LinSystem, ReducedSystem};
use crate::tower::{algebraic_coefficients, StepKind, Tower};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DocumentKind {
    System,
    Reduced,
    Tower,
    Matrix,
}

impl DocumentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DocumentKind::System => "system",
            DocumentKind::Reduced => "reduced",
            DocumentKind::Tower => "tower",
            DocumentKind::Matrix => "matrix",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document {
    System(LinSystem),
    Reduced(ReducedSystem),
    Tower(Tower),
}

impl Document {
    pub fn kind(&self) -> DocumentKind {
        match self {
            Document::System(_) => DocumentKind::System,
            Document::Reduced(_) => DocumentKind::Reduced,
            Document::Tower(_) => DocumentKind::Tower,
        }
    }

    pub fn serialize(&self) -> String {
        match self {
            Document::System(s) => serialize_system(s),
            Document::Reduced(r) => serialize_reduced(r),
            Document::Tower(t) => serialize_tower(t),
        }
    }
}

/// Raw text with the kind read off its declarations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceDocument {
    pub text: String,
    pub kind: DocumentKind,
}

impl SourceDocument {
    pub fn new(text: impl Into<String>) -> Self {
        let text = text.into();
        let keys: Vec<String> = lines(&text).iter().filter_map(|l| l.text.split_once(':').map(|(k, _)| k.trim().to_string())).collect();
        let has = |k: &str| keys.iter().any(|x| x == k);
        let kind = if has("base") {
            DocumentKind::Tower
        } else if has("vars") && has("kolchin") {
            DocumentKind::Reduced
        } else if has("vars") {
            DocumentKind::System
        } else {
            DocumentKind::Matrix
        };
        SourceDocument { text, kind }
    }

    /// Parses systems, reduced systems and towers; bare matrices need a
    /// context and go through [`parse_matrix`].
    pub fn parse(&self) -> Result<Document, ParseError> {
        match self.kind {
            DocumentKind::System => parse_system(&self.text).map(Document::System),
            DocumentKind::Reduced => parse_reduced(&self.text).map(Document::Reduced),
            DocumentKind::Tower => parse_tower(&self.text).map(Document::Tower),
            DocumentKind::Matrix => Err(ParseError::new(ParseErrorKind::MissingField, 0, "expected `vars:` or `base:`")
                .expecting(&["`vars:`", "`base:`"])
                .locate(&self.text)),
        }
    }
}

impl ParseError {
    fn expecting(mut self, what: &[&str]) -> Self {
        self.expected = what.iter().map(|s| s.to_string()).collect();
        self
    }
}

struct Line<'a> {
    offset: usize,
    text: &'a str,
}

/// Non-blank lines with comments removed; `offset` is the byte position of
/// the first non-blank character.
fn lines(src: &str) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    let mut start = 0;
    for raw in src.split_inclusive('\n') {
        let body = raw.split('#').next().unwrap_or("");
        let trimmed = body.trim_start();
        let lead = body.len() - trimmed.len();
        let text = trimmed.trim_end();
        if !text.is_empty() {
            out.push(Line { offset: start + lead, text });
        }
        start += raw.len();
    }
    out
}

fn err(kind: ParseErrorKind, at: usize, msg: impl Into<String>) -> ParseError {
    ParseError::new(kind, at, msg)
}

/// `key: value` with the offset of the value.
fn key_value<'a>(line: &Line<'a>) -> Option<(&'a str, &'a str, usize)> {
    let (k, v) = line.text.split_once(':')?;
    let lead = v.len() - v.trim_start().len();
    Some((k.trim(), v.trim(), line.offset + k.len() + 1 + lead))
}

fn names(value: &str, at: usize) -> Result<Vec<String>, ParseError> {
    let mut out = Vec::new();
    let mut pos = at;
    for part in value.split(',') {
        let lead = part.len() - part.trim_start().len();
        let name = part.trim();
        if !is_identifier(name) {
            return Err(err(ParseErrorKind::InvalidDeclaration, pos + lead, format!("`{name}` is not a variable name"))
                .expecting(&["identifier"]));
        }
        if out.iter().any(|n: &String| n == name) {
            return Err(err(ParseErrorKind::InvalidDeclaration, pos + lead, format!("variable `{name}` declared twice")));
        }
        out.push(name.to_string());
        pos += part.len() + 1;
    }
    Ok(out)
}

fn radicand(value: &str, at: usize) -> Result<BigUint, ParseError> {
    let d: BigUint = value
        .parse()
        .map_err(|_| err(ParseErrorKind::MalformedLiteral, at, format!("`{value}` is not a positive integer")))?;
    let (square, free) = squarefree_decompose(&d);
    if !square.is_one() || free <= BigUint::one() {
        return Err(err(ParseErrorKind::InvalidDeclaration, at, format!("radicand {d} is not square-free and greater than 1")));
    }
    Ok(d)
}

fn count(value: &str, at: usize) -> Result<usize, ParseError> {
    match value.parse::<usize>() {
        Ok(0) => Err(err(ParseErrorKind::InvalidDeclaration, at, "rank must be positive")),
        Ok(n) => Ok(n),
        Err(_) => Err(err(ParseErrorKind::MalformedLiteral, at, format!("`{value}` is not a positive integer"))),
    }
}

fn set_once<T>(slot: &mut Option<T>, value: T, key: &str, at: usize) -> Result<(), ParseError> {
    if slot.is_some() {
        return Err(err(ParseErrorKind::DuplicateField, at, format!("`{key}` given twice")));
    }
    *slot = Some(value);
    Ok(())
}

/// `[e1, e2, ...]` over `ctx`.
fn bracketed(line: &str, at: usize, ctx: &DiffContext) -> Result<Vec<RatFunc>, ParseError> {
    let Some(inner) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) else {
        return Err(err(ParseErrorKind::Syntax, at, "expected a bracketed list").expecting(&["`[`"]));
    };
    let mut out = Vec::new();
    let mut pos = at + 1;
    for part in inner.split(',') {
        out.push(parse_at(part, pos, ctx)?);
        pos += part.len() + 1;
    }
    Ok(out)
}

/// Rows following a block header, checked against `rank`.
fn matrix_rows(rows: &[Line<'_>], rank: usize, ctx: &DiffContext, header_at: usize) -> Result<Matrix, ParseError> {
    if rows.len() != rank {
        let at = rows.get(rank).map_or(header_at, |l| l.offset);
        return Err(err(ParseErrorKind::DimensionMismatch, at, format!("expected {rank} rows, found {}", rows.len())));
    }
    let mut out = Vec::with_capacity(rank);
    for l in rows {
        let row = bracketed(l.text, l.offset, ctx)?;
        if row.len() != rank {
            return Err(err(ParseErrorKind::DimensionMismatch, l.offset, format!("expected {rank} entries, found {}", row.len())));
        }
        out.push(row);
    }
    Ok(Matrix::from_rows(out).expect("rows checked"))
}

struct SystemParts {
    ctx: DiffContext,
    kolchin: Option<Vec<String>>,
    matrices: Vec<Matrix>,
}

fn parse_system_parts(src: &str) -> Result<SystemParts, ParseError> {
    let ls = lines(src);
    let (mut vars, mut sqrt, mut rank, mut kolchin) = (None, None, None, None);
    let mut i = 0;
    // declarations
    while i < ls.len() && !ls[i].text.starts_with("matrix") {
        let l = &ls[i];
        let Some((k, v, at)) = key_value(l) else {
            return Err(err(ParseErrorKind::Syntax, l.offset, "expected `key: value`").expecting(&["`vars:`", "`rank:`", "`matrix`"]));
        };
        match k {
            "vars" => set_once(&mut vars, (names(v, at)?, at), k, l.offset)?,
            "sqrt" => set_once(&mut sqrt, radicand(v, at)?, k, l.offset)?,
            "rank" => set_once(&mut rank, count(v, at)?, k, l.offset)?,
            "kolchin" => set_once(&mut kolchin, (names(v, at)?, at), k, l.offset)?,
            _ => {
                return Err(err(ParseErrorKind::Syntax, l.offset, format!("unknown field `{k}`"))
                    .expecting(&["`vars:`", "`sqrt:`", "`rank:`", "`kolchin:`", "`matrix`"]))
            }
        }
        i += 1;
    }
    let here = ls.get(i).map_or(src.len(), |l| l.offset);
    let (vars, vars_at) = vars.ok_or_else(|| err(ParseErrorKind::MissingField, here, "missing `vars:`").expecting(&["`vars:`"]))?;
    let rank = rank.ok_or_else(|| err(ParseErrorKind::MissingField, here, "missing `rank:`").expecting(&["`rank:`"]))?;
    let base = DiffContext::new(vars.clone(), sqrt)
        .map_err(|e| err(ParseErrorKind::InvalidDeclaration, vars_at, e.to_string()))?;
    let ctx = match &kolchin {
        Some((us, at)) => {
            base.extend_constants(us.clone()).map_err(|e| err(ParseErrorKind::InvalidDeclaration, *at, e.to_string()))?
        }
        None => base,
    };
    let block_names: Vec<String> = if kolchin.is_some() { vec!["D".into()] } else { vars.clone() };
    let mut blocks: Vec<Option<Matrix>> = vec![None; block_names.len()];
    while i < ls.len() {
        let l = &ls[i];
        let head = l.text.strip_prefix("matrix").and_then(|r| r.strip_suffix(':'));
        let Some(name) = head.map(str::trim).filter(|n| !n.is_empty()) else {
            return Err(err(ParseErrorKind::Syntax, l.offset, "expected a matrix block header").expecting(&["`matrix <var>:`"]));
        };
        let Some(idx) = block_names.iter().position(|n| n == name) else {
            return Err(err(ParseErrorKind::InvalidDeclaration, l.offset, format!("no derivation named `{name}`"))
                .expecting(&block_names.iter().map(|n| n.as_str()).collect::<Vec<_>>()));
        };
        if blocks[idx].is_some() {
            return Err(err(ParseErrorKind::DuplicateField, l.offset, format!("matrix `{name}` given twice")));
        }
        let end = (i + 1..ls.len()).find(|&j| !ls[j].text.starts_with('[')).unwrap_or(ls.len());
        blocks[idx] = Some(matrix_rows(&ls[i + 1..end], rank, &ctx, l.offset)?);
        i = end;
    }
    let mut matrices = Vec::with_capacity(blocks.len());
    for (name, b) in block_names.iter().zip(blocks) {
        match b {
            Some(m) => matrices.push(m),
            None => {
                return Err(err(ParseErrorKind::MissingField, src.len(), format!("missing `matrix {name}:`"))
                    .expecting(&["`matrix`"]))
            }
        }
    }
    Ok(SystemParts { ctx, kolchin: kolchin.map(|(k, _)| k), matrices })
}

/// Reads a system; a `kolchin:` declaration yields the one-derivation form.
pub fn parse_system(src: &str) -> Result<LinSystem, ParseError> {
    let parts = parse_system_parts(src).map_err(|e| e.locate(src))?;
    let built = match parts.kolchin {
        Some(us) => LinSystem::new_kolchin(parts.ctx, us.len(), parts.matrices.into_iter().next().expect("one block")),
        None => LinSystem::new(parts.ctx, parts.matrices),
    };
    built.map_err(|e| err(ParseErrorKind::DimensionMismatch, 0, e.to_string()).locate(src))
}

pub fn parse_reduced(src: &str) -> Result<ReducedSystem, ParseError> {
    let parts = parse_system_parts(src).map_err(|e| e.locate(src))?;
    let Some(us) = parts.kolchin else {
        return Err(err(ParseErrorKind::MissingField, 0, "missing `kolchin:`").expecting(&["`kolchin:`"]).locate(src));
    };
    let a_d = parts.matrices.into_iter().next().expect("one block");
    ReducedSystem::from_parts(parts.ctx, us.len(), a_d).map_err(|e| err(ParseErrorKind::DimensionMismatch, 0, e.to_string()).locate(src))
}

/// Reads a bare matrix over `ctx`; `rank:` is optional.
pub fn parse_matrix(src: &str, ctx: &DiffContext) -> Result<Matrix, ParseError> {
    let run = || {
        let ls = lines(src);
        let mut rest = &ls[..];
        let mut rank = None;
        if let Some(l) = rest.first().filter(|l| !l.text.starts_with('[')) {
            match key_value(l) {
                Some(("rank", v, at)) => rank = Some(count(v, at)?),
                _ => return Err(err(ParseErrorKind::Syntax, l.offset, "expected `rank:` or a row").expecting(&["`rank:`", "`[`"])),
            }
            rest = &rest[1..];
        }
        let Some(first) = rest.first() else {
            return Err(err(ParseErrorKind::MissingField, src.len(), "matrix has no rows").expecting(&["`[`"]));
        };
        let rank = match rank {
            Some(r) => r,
            None => bracketed(first.text, first.offset, ctx)?.len(),
        };
        matrix_rows(rest, rank, ctx, first.offset)
    };
    run().map_err(|e| e.locate(src))
}

fn join(v: &[String]) -> String {
    v.join(", ")
}

fn write_matrix(out: &mut String, m: &Matrix, names: &[String]) {
    for i in 0..m.nrows() {
        let row: Vec<String> = m.row(i).iter().map(|e| render_ratfunc(e, names)).collect();
        out.push_str(&format!("  [{}]\n", row.join(", ")));
    }
}

fn header(ctx_vars: &[String], radicand: Option<&BigUint>, key: &str) -> String {
    let mut out = format!("{key}: {}\n", join(ctx_vars));
    if let Some(d) = radicand {
        out.push_str(&format!("sqrt: {d}\n"));
    }
    out
}

pub fn serialize_system(s: &LinSystem) -> String {
    let ctx = s.ctx();
    match s.derivations() {
        Derivations::Kolchin { m } => {
            let r = ReducedSystem::from_parts(ctx.clone(), *m, s.matrix(0).clone()).expect("valid reduced system");
            serialize_reduced(&r)
        }
        Derivations::Partial => {
            let names = ctx.vars();
            let mut out = header(names, ctx.radicand(), "vars");
            out.push_str(&format!("rank: {}\n", s.rank()));
            for (j, a) in s.matrices().iter().enumerate() {
                out.push_str(&format!("matrix {}:\n", names[j]));
                write_matrix(&mut out, a, names);
            }
            out
        }
    }
}

pub fn serialize_reduced(r: &ReducedSystem) -> String {
    let names = r.ctx().vars();
    let mut out = header(&names[..r.m()], r.ctx().radicand(), "vars");
    out.push_str(&format!("kolchin: {}\n", join(r.u_names())));
    out.push_str(&format!("rank: {}\nmatrix D:\n", r.a_d().nrows()));
    write_matrix(&mut out, r.a_d(), names);
    out
}

pub fn serialize_matrix(m: &Matrix, names: &[String]) -> String {
    let mut out = format!("rank: {}\n", m.nrows());
    write_matrix(&mut out, m, names);
    out
}

pub fn serialize_tower(t: &Tower) -> String {
    let names = t.names();
    let out_base = match t.kolchin_m() {
        Some(m) => {
            let mut s = header(&names[..m], t.base().radicand(), "base");
            s.push_str(&format!("kolchin: {}\n", join(&names[m..2 * m])));
            s
        }
        None => header(&names[..t.base_len()], t.base().radicand(), "base"),
    };
    let mut out = out_base;
    for st in t.steps() {
        let lvl = st.level();
        let below = &names[..lvl];
        let list = |v: &[RatFunc]| v.iter().map(|c| render_ratfunc(c, below)).collect::<Vec<_>>().join(", ");
        let body = match st.kind() {
            StepKind::Algebraic(cs) => {
                let n = lvl + 1;
                let a = RatFunc::var(n, lvl);
                let mut p = a.pow(cs.len() as i32);
                for (j, c) in cs.iter().enumerate() {
                    p = &p + &(&c.pad_vars(n) * &a.pow(j as i32));
                }
                format!("algebraic {}", render_ratfunc(&p, &names[..n]))
            }
            k => format!("{} [{}]", k.tag(), list(k.coefficients())),
        };
        out.push_str(&format!("step {}: {}\n", join(st.names()), body));
    }
    for r in t.relations() {
        out.push_str(&format!("relation {}\n", super::render_poly(&r.polynomial(), names)));
    }
    out
}

fn step_kind(tag: &str) -> Option<fn(Vec<RatFunc>) -> StepKind> {
    Some(match tag {
        "integral" => StepKind::Integral,
        "expintegral" => StepKind::ExpIntegral,
        "rotationpair" => StepKind::RotationPair,
        "algebraic" => StepKind::Algebraic,
        _ => return None,
    })
}

fn parse_tower_inner(src: &str) -> Result<Tower, ParseError> {
    let ls = lines(src);
    let (mut base, mut sqrt, mut kolchin) = (None, None, None);
    let mut i = 0;
    while i < ls.len() && !ls[i].text.starts_with("step") && !ls[i].text.starts_with("relation") {
        let l = &ls[i];
        let Some((k, v, at)) = key_value(l) else {
            return Err(err(ParseErrorKind::Syntax, l.offset, "expected `key: value`").expecting(&["`base:`", "`step`"]));
        };
        match k {
            "base" => set_once(&mut base, (names(v, at)?, at), k, l.offset)?,
            "sqrt" => set_once(&mut sqrt, radicand(v, at)?, k, l.offset)?,
            "kolchin" => set_once(&mut kolchin, (names(v, at)?, at), k, l.offset)?,
            _ => {
                return Err(err(ParseErrorKind::Syntax, l.offset, format!("unknown field `{k}`"))
                    .expecting(&["`base:`", "`sqrt:`", "`kolchin:`", "`step`", "`relation`"]))
            }
        }
        i += 1;
    }
    let here = ls.get(i).map_or(src.len(), |l| l.offset);
    let (base, base_at) = base.ok_or_else(|| err(ParseErrorKind::MissingField, here, "missing `base:`").expecting(&["`base:`"]))?;
    let ctx = DiffContext::new(base.clone(), sqrt).map_err(|e| err(ParseErrorKind::InvalidDeclaration, base_at, e.to_string()))?;
    let mut t = match kolchin {
        Some((us, at)) => {
            if us.len() != base.len() {
                return Err(err(ParseErrorKind::DimensionMismatch, at, format!("expected {} names after `kolchin:`", base.len())));
            }
            let full = ctx.extend_constants(us).map_err(|e| err(ParseErrorKind::InvalidDeclaration, at, e.to_string()))?;
            Tower::new_kolchin(full, base.len())
        }
        None => Tower::new(ctx),
    };
    let mut relations = Vec::new();
    for l in &ls[i..] {
        if let Some(rest) = l.text.strip_prefix("relation") {
            let lead = rest.len() - rest.trim_start().len();
            if lead == 0 {
                return Err(err(ParseErrorKind::Syntax, l.offset, "expected `relation <expr>`").expecting(&["`relation`"]));
            }
            relations.push((rest.trim_start(), l.offset + "relation".len() + lead));
            continue;
        }
        if !relations.is_empty() {
            return Err(err(ParseErrorKind::Syntax, l.offset, "steps must precede relations").expecting(&["`relation`"]));
        }
        let Some(rest) = l.text.strip_prefix("step").filter(|r| r.starts_with(char::is_whitespace)) else {
            return Err(err(ParseErrorKind::Syntax, l.offset, "expected a step").expecting(&["`step`", "`relation`"]));
        };
        let Some((head, body)) = rest.split_once(':') else {
            return Err(err(ParseErrorKind::Syntax, l.offset, "expected `step <names>: <kind> ...`").expecting(&["`:`"]));
        };
        let head_at = l.offset + 4 + (rest.len() - rest.trim_start().len());
        let gens = names(head, head_at)?;
        let body_at = l.offset + 4 + head.len() + 1 + (body.len() - body.trim_start().len());
        let body = body.trim();
        let tag = body.split(|c: char| c.is_whitespace() || c == '[').next().unwrap_or("");
        let Some(make) = step_kind(tag) else {
            return Err(err(ParseErrorKind::InvalidStep, body_at, format!("unknown step kind `{tag}`"))
                .expecting(&["`integral`", "`expintegral`", "`algebraic`", "`rotationpair`"]));
        };
        let arg = body[tag.len()..].trim_start();
        let arg_at = body_at + (body.len() - arg.len());
        let names_ref: Vec<&str> = gens.iter().map(String::as_str).collect();
        let kind = if tag == "algebraic" {
            if gens.len() != 1 {
                return Err(err(ParseErrorKind::InvalidStep, head_at, "an algebraic step adjoins one generator"));
            }
            let ext = t.ctx().extend_constants([gens[0].clone()]).map_err(|e| err(ParseErrorKind::InvalidStep, head_at, e.to_string()))?;
            let p = parse_at(arg, arg_at, &ext)?;
            let coeffs = algebraic_coefficients(&p, t.nvars(), &gens[0]).map_err(|e| err(ParseErrorKind::InvalidStep, arg_at, e.to_string()))?;
            make(coeffs)
        } else {
            make(bracketed(arg, arg_at, &t.ctx())?)
        };
        t = t.extend(&names_ref, kind).map_err(|e| err(ParseErrorKind::InvalidStep, l.offset, e.to_string()))?;
    }
    for (text, at) in relations {
        let r = parse_at(text, at, &t.ctx())?;
        if !t.is_zero(&r) {
            return Err(err(ParseErrorKind::InvalidStep, at, "relation does not hold in the tower"));
        }
    }
    Ok(t)
}

pub fn parse_tower(src: &str) -> Result<Tower, ParseError> {
    parse_tower_inner(src).map_err(|e| e.locate(src))
}
