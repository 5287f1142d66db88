//! Scoped classification of differential Galois groups.
//!
//! The workhorse is a torus computation on "characters": vectors `chi` with
//! `d_j y = chi_j y` for the exponential solutions of a system. A character is
//! of finite order when it is a rational combination of logarithmic
//! derivatives `d_j v / v` of candidate elements `v` (the differential
//! variables and the denominators met in the input). The torus dimension is
//! the rank of the characters modulo such combinations; exponentials not
//! caught this way are assumed transcendental and flagged.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use crate::error::GaloisError;
use crate::linalg;
use crate::matrix::Matrix;
use crate::poly::MultiPoly;
use crate::ratfunc::{self, RatFunc};
use crate::scalar::{indicial_roots, rat_int, QuadScalar, Rat};
use crate::system::{check_integrability, Derivations, Integrability, LinSystem};
use crate::tower::{solve_triangular, StepKind};

/// Largest finite order reported as `FiniteCyclic`.
pub const TORSION_BOUND: u64 = 12;

pub const TRANSCENDENCE_FLAG: &str = "transcendence of exponentials assumed";

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Descriptor {
    Trivial,
    FiniteCyclic(u64),
    Additive,
    SplitTorus(usize),
    NonSplitTorus { so2_blocks: usize, split_dim: usize },
    Triangular { split: bool },
    Product(Vec<Descriptor>),
    Unknown(String),
}

impl Descriptor {
    pub fn solvable(&self) -> bool {
        match self {
            Descriptor::Unknown(_) => false,
            Descriptor::Product(v) => v.iter().all(Descriptor::solvable),
            _ => true,
        }
    }

    /// False exactly when a non-split torus block is present.
    pub fn real_split(&self) -> bool {
        match self {
            Descriptor::NonSplitTorus { so2_blocks, .. } => *so2_blocks == 0,
            Descriptor::Product(v) => v.iter().all(Descriptor::real_split),
            _ => true,
        }
    }

    pub fn has_non_split(&self) -> bool {
        !self.real_split()
    }

    fn contains(&self, pred: &dyn Fn(&Descriptor) -> bool) -> bool {
        pred(self) || matches!(self, Descriptor::Product(v) if v.iter().any(|d| d.contains(pred)))
    }

    /// Flattens products, drops trivial factors and merges split tori.
    pub fn normalize(self) -> Descriptor {
        let Descriptor::Product(parts) = self else {
            return match self {
                Descriptor::SplitTorus(0) | Descriptor::FiniteCyclic(1) => Descriptor::Trivial,
                Descriptor::NonSplitTorus { so2_blocks: 0, split_dim } => Descriptor::SplitTorus(split_dim).normalize(),
                d => d,
            };
        };
        let mut flat = Vec::new();
        let mut stack: Vec<Descriptor> = parts.into_iter().rev().collect();
        while let Some(d) = stack.pop() {
            match d.normalize() {
                Descriptor::Product(inner) => stack.extend(inner.into_iter().rev()),
                Descriptor::Trivial => {}
                d => flat.push(d),
            }
        }
        let split: usize = flat.iter().map(|d| if let Descriptor::SplitTorus(k) = d { *k } else { 0 }).sum();
        if split > 0 {
            let ns = flat.iter().position(|d| matches!(d, Descriptor::NonSplitTorus { .. }));
            flat.retain(|d| !matches!(d, Descriptor::SplitTorus(_)));
            match ns {
                Some(_) => {
                    for d in flat.iter_mut() {
                        if let Descriptor::NonSplitTorus { split_dim, .. } = d {
                            *split_dim += split;
                            break;
                        }
                    }
                }
                None => flat.insert(0, Descriptor::SplitTorus(split)),
            }
        }
        match flat.len() {
            0 => Descriptor::Trivial,
            1 => flat.pop().expect("one factor"),
            _ => Descriptor::Product(flat),
        }
    }
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Descriptor::Trivial => write!(f, "1"),
            Descriptor::FiniteCyclic(n) => write!(f, "Cyclic({n})"),
            Descriptor::Additive => write!(f, "Ga"),
            Descriptor::SplitTorus(1) => write!(f, "Gm"),
            Descriptor::SplitTorus(d) => write!(f, "Gm^{d}"),
            Descriptor::NonSplitTorus { so2_blocks: 1, split_dim: 0 } => write!(f, "SO2"),
            Descriptor::NonSplitTorus { so2_blocks, split_dim: 0 } => write!(f, "SO2^{so2_blocks}"),
            Descriptor::NonSplitTorus { so2_blocks, split_dim } => {
                let so2 = if *so2_blocks == 1 { "SO2".to_string() } else { format!("SO2^{so2_blocks}") };
                let gm = if *split_dim == 1 { "Gm".to_string() } else { format!("Gm^{split_dim}") };
                write!(f, "NonSplitTorus({so2}, {gm})")
            }
            Descriptor::Triangular { split } => write!(f, "Triangular({})", if *split { "split" } else { "nonsplit" }),
            Descriptor::Product(v) => {
                let parts: Vec<String> = v.iter().map(|d| d.to_string()).collect();
                write!(f, "Product({})", parts.join(", "))
            }
            Descriptor::Unknown(r) => write!(f, "Unknown({r:?})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaloisClass {
    pub descriptor: Descriptor,
    /// Unverified assumptions behind the descriptor.
    pub flags: Vec<String>,
}

impl GaloisClass {
    fn new(descriptor: Descriptor, mut flags: Vec<String>) -> Self {
        flags.sort();
        flags.dedup();
        GaloisClass { descriptor: descriptor.normalize(), flags }
    }

    fn unknown(reason: &str) -> Self {
        GaloisClass { descriptor: Descriptor::Unknown(reason.into()), flags: Vec::new() }
    }

    pub fn solvable(&self) -> bool {
        self.descriptor.solvable()
    }

    pub fn real_split(&self) -> bool {
        self.descriptor.real_split()
    }
}

impl fmt::Display for GaloisClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.descriptor)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LiouvillianVerdict {
    GeneralisedLiouvillian,
    NotGeneralisedLiouvillian,
    Unknown,
}

impl fmt::Display for LiouvillianVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LiouvillianVerdict::GeneralisedLiouvillian => "GeneralisedLiouvillian",
            LiouvillianVerdict::NotGeneralisedLiouvillian => "NotGeneralisedLiouvillian",
            LiouvillianVerdict::Unknown => "Unknown",
        };
        write!(f, "{s}")
    }
}

pub fn liouvillian_verdict(g: &GaloisClass) -> LiouvillianVerdict {
    let d = &g.descriptor;
    if d.has_non_split() {
        return LiouvillianVerdict::NotGeneralisedLiouvillian;
    }
    let undecided = |x: &Descriptor| matches!(x, Descriptor::Unknown(_) | Descriptor::Triangular { split: false });
    if d.contains(&undecided) || !d.solvable() {
        return LiouvillianVerdict::Unknown;
    }
    LiouvillianVerdict::GeneralisedLiouvillian
}

/// `A_j = f_j I + g_j C` with constant `C`, normalized so that `C[0][0] = 0`
/// and the first nonzero entry of `C` (row-major) is one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarPlusConstantForm {
    pub f: Vec<RatFunc>,
    pub c: Vec<Vec<QuadScalar>>,
    pub g: Vec<RatFunc>,
}

pub fn match_scalar_plus_constant(s: &LinSystem) -> Option<ScalarPlusConstantForm> {
    let r = s.rank();
    if r < 2 {
        return None;
    }
    let f: Vec<RatFunc> = s.matrices().iter().map(|a| a.get(0, 0).clone()).collect();
    let shifted: Vec<Matrix> = s
        .matrices()
        .iter()
        .zip(&f)
        .map(|(a, fj)| {
            let mut b = a.clone();
            for i in 0..r {
                b.set(i, i, a.get(i, i) - fj);
            }
            b
        })
        .collect();
    let (pj, pos) = shifted
        .iter()
        .enumerate()
        .find_map(|(j, b)| b.entries().iter().position(|e| !e.is_zero()).map(|p| (j, p)))?;
    let pivot = shifted[pj].entries()[pos].clone();
    let mut c = vec![vec![QuadScalar::zero(); r]; r];
    for i in 0..r {
        for k in 0..r {
            c[i][k] = (shifted[pj].get(i, k) / &pivot).as_constant()?;
        }
    }
    let mut g = Vec::with_capacity(f.len());
    for b in &shifted {
        let gj = b.entries()[pos].clone();
        for i in 0..r {
            for k in 0..r {
                let expect = gj.scale(&c[i][k]);
                if !b.get(i, k).equals(&expect) {
                    return None;
                }
            }
        }
        g.push(gj);
    }
    Some(ScalarPlusConstantForm { f, c, g })
}

// ---------------------------------------------------------------------------
// characters

fn diff_vars(s: &LinSystem) -> Vec<usize> {
    match s.derivations() {
        Derivations::Partial => (0..s.ctx().derivation_count()).collect(),
        Derivations::Kolchin { m } => (0..*m).collect(),
    }
}

fn monic_dominant(p: &MultiPoly) -> MultiPoly {
    let c = p.dominant().map(|(_, c)| c.clone()).expect("nonzero");
    p.scale(&c.inv())
}

fn candidates(s: &LinSystem, vectors: &[Vec<RatFunc>]) -> Vec<MultiPoly> {
    let n = s.ctx().nvars();
    let mut out: Vec<MultiPoly> = diff_vars(s).into_iter().map(|v| MultiPoly::var(n, v)).collect();
    for v in vectors {
        for e in v {
            let den = e.den();
            let mut rest = den.div_monomial(&den.monomial_content());
            if rest.as_constant().is_some() {
                continue;
            }
            rest = monic_dominant(&rest);
            for c in out.iter() {
                while let Some(q) = rest.try_div_exact(c).filter(|_| c.as_constant().is_none() && c.len() > 1) {
                    rest = q;
                }
            }
            if rest.as_constant().is_none() && !out.contains(&rest) {
                out.push(monic_dominant(&rest));
            }
        }
    }
    out
}

/// Linear equations over Q whose unknowns are the coefficients of the given
/// columns; every column is a vector over the derivations.
fn equations(columns: &[Vec<RatFunc>]) -> Vec<Vec<Rat>> {
    let ncols = columns.len();
    let nder = columns.first().map_or(0, Vec::len);
    let mut rows = Vec::new();
    for j in 0..nder {
        let n = columns[0][j].nvars();
        let mut l = MultiPoly::one(n);
        for col in columns {
            let d = col[j].den();
            if l.try_div_exact(d).is_none() {
                l = &l * d;
            }
        }
        let polys: Vec<MultiPoly> = columns
            .iter()
            .map(|col| {
                let e = &col[j];
                if e.is_zero() {
                    return MultiPoly::zero(n);
                }
                &l.try_div_exact(e.den()).expect("common multiple") * e.num()
            })
            .collect();
        let mut monos: Vec<Vec<u32>> = polys.iter().flat_map(|p| p.terms().map(|(e, _)| e.clone())).collect();
        monos.sort();
        monos.dedup();
        for mono in monos {
            let coeffs: Vec<QuadScalar> = polys.iter().map(|p| p.coeff(&mono)).collect();
            rows.push(coeffs.iter().map(|c| c.rational_part().clone()).collect());
            if coeffs.iter().any(|c| !c.is_rational()) {
                rows.push(coeffs.iter().map(|c| c.radical_part().clone()).collect());
            }
        }
    }
    debug_assert!(rows.iter().all(|r: &Vec<Rat>| r.len() == ncols));
    rows
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct TorusInfo {
    dim: usize,
    invariants: Vec<BigInt>,
}

fn torus_of_characters(s: &LinSystem, chars: &[Vec<RatFunc>]) -> TorusInfo {
    let chars: Vec<Vec<RatFunc>> = chars.iter().filter(|c| c.iter().any(|x| !x.is_zero())).cloned().collect();
    if chars.is_empty() {
        return TorusInfo { dim: 0, invariants: Vec::new() };
    }
    let cands = candidates(s, &chars);
    let m = s.derivation_count();
    let logs: Vec<Vec<RatFunc>> = cands
        .iter()
        .map(|v| {
            let vf = RatFunc::from_poly(v.clone());
            (0..m).map(|j| &s.derive(&vf, j) / &vf).collect()
        })
        .collect();
    let mut columns = chars.clone();
    columns.extend(logs.iter().map(|w| w.iter().map(|x| -x).collect::<Vec<_>>()));
    let rows = equations(&columns);
    let total = columns.len();
    let nchar = chars.len();
    let null = linalg::nullspace(&rows, total);
    let projected: Vec<Vec<Rat>> = null.iter().map(|v| v[..nchar].to_vec()).collect();
    let rel_rank = linalg::rank(&projected, nchar);
    let dim = nchar - rel_rank;
    if dim > 0 {
        return TorusInfo { dim, invariants: Vec::new() };
    }
    // every character is a rational combination of logarithmic derivatives
    let mut exps = Vec::new();
    for ch in &chars {
        let mut cols = logs.clone();
        cols.push(ch.clone());
        let full = equations(&cols);
        let k = logs.len();
        let a: Vec<Vec<Rat>> = full.iter().map(|r| r[..k].to_vec()).collect();
        let b: Vec<Rat> = full.iter().map(|r| r[k].clone()).collect();
        match linalg::solve(&a, &b, k) {
            Some(e) => exps.push(e),
            None => return TorusInfo { dim: 1, invariants: Vec::new() },
        }
    }
    TorusInfo { dim: 0, invariants: linalg::torsion_invariants(&exps, cands.len()) }
}

fn torus_descriptor(info: &TorusInfo, flags: &mut Vec<String>) -> Descriptor {
    if info.dim > 0 {
        flags.push(TRANSCENDENCE_FLAG.into());
        return Descriptor::SplitTorus(info.dim);
    }
    finite_descriptor(&info.invariants)
}

fn finite_descriptor(invariants: &[BigInt]) -> Descriptor {
    let orders: Vec<u64> = invariants.iter().map(|n| n.to_u64().unwrap_or(u64::MAX)).collect();
    if orders.iter().any(|&n| n > TORSION_BOUND) {
        return Descriptor::Unknown(format!("finite order beyond the bound {TORSION_BOUND}"));
    }
    // pairwise coprime factors combine into one cyclic group
    let coprime = orders.iter().enumerate().all(|(i, a)| orders[i + 1..].iter().all(|b| num_integer::gcd(*a, *b) == 1));
    let prod: u64 = orders.iter().product();
    if orders.is_empty() {
        Descriptor::Trivial
    } else if coprime && prod <= TORSION_BOUND {
        Descriptor::FiniteCyclic(prod)
    } else {
        Descriptor::Product(orders.into_iter().map(Descriptor::FiniteCyclic).collect())
    }
}

fn combine(a: &[RatFunc], lambda: &QuadScalar, b: &[RatFunc]) -> Option<Vec<RatFunc>> {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            if let (Some(l), Some(r)) = (lambda.radicand(), y.radicand().or(x.radicand())) {
                if l != r {
                    return None;
                }
            }
            Some(x + &y.scale(lambda))
        })
        .collect()
}

/// Whether `int g` lies in the base field (decided for polynomial vectors and
/// for components failing the one-variable derivative test).
fn integral_in_field(s: &LinSystem, g: &[RatFunc]) -> Option<bool> {
    let parts: Vec<RatFunc> = match s.derivations() {
        Derivations::Partial => g.to_vec(),
        Derivations::Kolchin { m } => {
            // D h = sum u_k d_k h: read off the u_k coefficients
            let gd = &g[0];
            if (*m..2 * m).any(|v| gd.den().depends_on(v)) {
                return None;
            }
            let n = gd.nvars();
            (0..*m)
                .map(|k| RatFunc::new(gd.num().partial(m + k), gd.den().clone()))
                .map(|x| x.pad_vars(n))
                .collect()
        }
    };
    let k = diff_vars(s).len();
    for (idx, x) in parts.iter().enumerate().take(k) {
        if !x.is_zero() && (0..x.nvars()).all(|v| v == idx || !x.depends_on(v)) {
            if let Ok(false) = ratfunc::is_derivative_univariate(x, idx) {
                return Some(false);
            }
        }
    }
    match ratfunc::antiderive_poly(&parts[..k.min(parts.len())]) {
        Ok(Some(_)) => Some(true),
        Ok(None) => None,
        Err(_) => Some(false),
    }
}

fn classify_diagonal_chars(s: &LinSystem) -> GaloisClass {
    let r = s.rank();
    let chars: Vec<Vec<RatFunc>> = (0..r).map(|i| s.matrices().iter().map(|a| a.get(i, i).clone()).collect()).collect();
    let info = torus_of_characters(s, &chars);
    let mut flags = Vec::new();
    let d = torus_descriptor(&info, &mut flags);
    GaloisClass::new(d, flags)
}

fn classify_spc(s: &LinSystem, form: &ScalarPlusConstantForm) -> GaloisClass {
    let r = form.c.len();
    let is_diag = (0..r).all(|i| (0..r).all(|k| i == k || form.c[i][k].is_zero()));
    let mut flags = Vec::new();
    if is_diag {
        let Some(chars) = (0..r).map(|i| combine(&form.f, &form.c[i][i], &form.g)).collect::<Option<Vec<_>>>() else {
            return GaloisClass::unknown("mixed radicands");
        };
        let info = torus_of_characters(s, &chars);
        let d = torus_descriptor(&info, &mut flags);
        return GaloisClass::new(d, flags);
    }
    if r != 2 {
        return GaloisClass::unknown("non-diagonal constant part of rank above 2");
    }
    let c = &form.c;
    let (Ok(tr), Ok(det)) = (c[0][0].try_add(&c[1][1]), c[0][0].try_mul(&c[1][1]).and_then(|x| c[0][1].try_mul(&c[1][0]).and_then(|y| x.try_sub(&y)))) else {
        return GaloisClass::unknown("mixed radicands");
    };
    let Ok(disc) = tr.try_mul(&tr).and_then(|t2| t2.try_sub(&det.scale(&rat_int(4)))) else {
        return GaloisClass::unknown("mixed radicands");
    };
    let half = Rat::new(BigInt::one(), BigInt::from(2));
    match disc.sign() {
        1 => {
            let Some(root) = disc.to_rat().and_then(QuadScalar::sqrt_rat) else {
                return GaloisClass::unknown("eigenvalues outside a quadratic field");
            };
            let (Ok(l1), Ok(l2)) = (tr.try_add(&root), tr.try_sub(&root)) else {
                return GaloisClass::unknown("mixed radicands");
            };
            let lambdas = [l1.scale(&half), l2.scale(&half)];
            let Some(chars) = lambdas.iter().map(|l| combine(&form.f, l, &form.g)).collect::<Option<Vec<_>>>() else {
                return GaloisClass::unknown("mixed radicands");
            };
            let info = torus_of_characters(s, &chars);
            let d = torus_descriptor(&info, &mut flags);
            GaloisClass::new(d, flags)
        }
        -1 => {
            // eigenvalues alpha +- i beta: the rotation part is never algebraic
            let alpha = tr.scale(&half);
            let Some(real) = combine(&form.f, &alpha, &form.g) else {
                return GaloisClass::unknown("mixed radicands");
            };
            let info = torus_of_characters(s, &[real]);
            let split_dim = info.dim;
            if split_dim > 0 {
                flags.push(TRANSCENDENCE_FLAG.into());
            }
            let mut parts = vec![Descriptor::NonSplitTorus { so2_blocks: 1, split_dim }];
            if split_dim == 0 {
                parts.push(finite_descriptor(&info.invariants));
            }
            GaloisClass::new(Descriptor::Product(parts), flags)
        }
        _ => {
            let lambda = tr.scale(&half);
            let Some(ch) = combine(&form.f, &lambda, &form.g) else {
                return GaloisClass::unknown("mixed radicands");
            };
            let info = torus_of_characters(s, &[ch]);
            let torus = torus_descriptor(&info, &mut flags);
            let additive = match integral_in_field(s, &form.g) {
                Some(true) => Descriptor::Trivial,
                Some(false) => Descriptor::Additive,
                None => {
                    flags.push("integral of the multiplier assumed outside the field".into());
                    Descriptor::Additive
                }
            };
            GaloisClass::new(Descriptor::Product(vec![torus, additive]), flags)
        }
    }
}

fn classify_triangular(s: &LinSystem) -> GaloisClass {
    let Ok((tower, _)) = solve_triangular(s) else {
        return GaloisClass::unknown("triangular solver failed");
    };
    let exps = tower.steps().iter().filter(|st| matches!(st.kind(), StepKind::ExpIntegral(_))).count();
    let ints = tower.steps().len() - exps;
    let mut flags = Vec::new();
    let d = match (exps, ints) {
        (0, 0) => Descriptor::Trivial,
        (e, 0) => {
            flags.push(TRANSCENDENCE_FLAG.into());
            Descriptor::SplitTorus(e)
        }
        (0, i) => {
            flags.push("integrals assumed outside the field".into());
            Descriptor::Product(vec![Descriptor::Additive; i])
        }
        _ => {
            flags.push(TRANSCENDENCE_FLAG.into());
            Descriptor::Triangular { split: true }
        }
    };
    GaloisClass::new(d, flags)
}

/// Classifies an integrable system: rank one and diagonal systems through
/// their characters, scalar-plus-constant systems through the eigenvalues
/// of the constant part, upper-triangular systems through their quadrature
/// tower. Anything else is `Unknown`.
pub fn classify(s: &LinSystem) -> Result<GaloisClass, GaloisError> {
    if let Integrability::Witness { i, j, .. } = check_integrability(s) {
        return Err(GaloisError::NotIntegrable(i, j));
    }
    if s.rank() == 1 || s.matrices().iter().all(Matrix::is_diagonal) {
        return Ok(classify_diagonal_chars(s));
    }
    if let Some(form) = match_scalar_plus_constant(s) {
        return Ok(classify_spc(s, &form));
    }
    if s.is_upper_triangular() {
        return Ok(classify_triangular(s));
    }
    Ok(GaloisClass::unknown("outside scoped families"))
}

/// Classification of `y'' = (c/x^2) y` over `R(x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerReport {
    pub class: GaloisClass,
    /// `1 + 4c`.
    pub discriminant: Rat,
    /// Real exponents, larger first; `None` when they are complex.
    pub roots: Option<(QuadScalar, QuadScalar)>,
    pub solutions: Vec<String>,
    pub relation: Option<String>,
}

fn exponent_text(r: &QuadScalar) -> String {
    let s = r.to_string();
    if s.chars().all(|c| c.is_ascii_digit()) {
        format!("x^{s}")
    } else {
        format!("x^({s})")
    }
}

pub fn classify_euler(c: &Rat) -> EulerReport {
    let disc = Rat::one() + rat_int(4) * c;
    match indicial_roots(c) {
        Err(_) => {
            let beta = QuadScalar::sqrt_rat(&-disc.clone()).expect("positive").scale(&Rat::new(BigInt::one(), BigInt::from(2)));
            let solutions = vec![format!("x^(1/2)*cos(({beta})*log(x))"), format!("x^(1/2)*sin(({beta})*log(x))")];
            EulerReport {
                class: GaloisClass::new(Descriptor::NonSplitTorus { so2_blocks: 1, split_dim: 0 }, Vec::new()),
                discriminant: disc,
                roots: None,
                solutions,
                relation: None,
            }
        }
        Ok((r1, r2)) => {
            let mut flags = Vec::new();
            let (class, solutions, relation) = if r1 == r2 {
                let r = r1.to_rat().expect("double root is 1/2").clone();
                let fin = finite_descriptor(&linalg::torsion_invariants(&[vec![r]], 1));
                let sols = vec![exponent_text(&r1), format!("{}*log(x)", exponent_text(&r1))];
                (Descriptor::Product(vec![fin, Descriptor::Additive]), sols, None)
            } else if r1.is_rational() {
                let e: Vec<Vec<Rat>> = [&r1, &r2].iter().map(|r| vec![r.to_rat().expect("rational").clone()]).collect();
                let fin = finite_descriptor(&linalg::torsion_invariants(&e, 1));
                (fin, vec![exponent_text(&r1), exponent_text(&r2)], None)
            } else {
                flags.push("x^r transcendental for irrational r".to_string());
                let rel = "y1*y2 = x".to_string();
                (Descriptor::SplitTorus(1), vec![exponent_text(&r1), exponent_text(&r2)], Some(rel))
            };
            EulerReport {
                class: GaloisClass::new(class, flags),
                discriminant: disc,
                roots: Some((r1, r2)),
                solutions,
                relation,
            }
        }
    }
}

/// Sign check used in reports: `r^2 - r - c == 0`.
pub fn is_indicial_root(r: &QuadScalar, c: &Rat) -> bool {
    let v = &(&(r * r) - r) - &QuadScalar::from_rat(c.clone());
    v.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratfunc::DiffContext;
    use crate::scalar::rat;

    fn ctx() -> DiffContext {
        DiffContext::new(["t1", "t2"], None).unwrap()
    }

    fn t(i: usize) -> RatFunc {
        RatFunc::var(2, i)
    }

    fn k(v: i64) -> RatFunc {
        RatFunc::from_int(2, v)
    }

    fn m2(a: [[RatFunc; 2]; 2]) -> Matrix {
        Matrix::from_rows(a.into_iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn rotation_family(sign: i64) -> LinSystem {
        let z = k(0);
        let a1 = m2([[t(0).inv(), z.clone()], [z.clone(), t(0).inv()]]);
        let a2 = m2([[z.clone(), k(1)], [k(sign), z]]);
        LinSystem::new(ctx(), vec![a1, a2]).unwrap()
    }

    #[test]
    fn reference_systems() {
        let rot = classify(&rotation_family(-1)).unwrap();
        assert_eq!(rot.to_string(), "SO2");
        assert_eq!(liouvillian_verdict(&rot), LiouvillianVerdict::NotGeneralisedLiouvillian);
        let hyp = classify(&rotation_family(1)).unwrap();
        assert_eq!(hyp.to_string(), "Gm");
        assert_eq!(liouvillian_verdict(&hyp), LiouvillianVerdict::GeneralisedLiouvillian);
        let sc = |f: RatFunc| Matrix::from_rows(vec![vec![f]]).unwrap();
        let s7 = LinSystem::new(ctx(), vec![sc(t(1)), sc(t(0))]).unwrap();
        let expo = classify(&s7).unwrap();
        assert_eq!(expo.descriptor, Descriptor::SplitTorus(1));
        assert!(expo.flags.contains(&TRANSCENDENCE_FLAG.to_string()));
    }

    #[test]
    fn form_matching() {
        let form = match_scalar_plus_constant(&rotation_family(-1)).unwrap();
        assert!(form.f[0].equals(&t(0).inv()));
        assert!(form.f[1].is_zero());
        assert!(form.g[0].is_zero() && form.g[1].is_one());
        assert_eq!(form.c[0][1], QuadScalar::one());
        assert_eq!(form.c[1][0], QuadScalar::from_int(-1));
        let dense = m2([[t(0), t(1)], [k(1), t(0) * t(1)]]);
        let s = LinSystem::new(ctx(), vec![dense.clone(), dense]).unwrap();
        assert!(match_scalar_plus_constant(&s).is_none());
    }

    #[test]
    fn rank_one_torsion() {
        let sc = |f: RatFunc| Matrix::from_rows(vec![vec![f]]).unwrap();
        let half = t(0).inv().scale(&QuadScalar::from_rat(rat(1, 2)));
        let s = LinSystem::new(ctx(), vec![sc(half), sc(k(0))]).unwrap();
        assert_eq!(classify(&s).unwrap().descriptor, Descriptor::FiniteCyclic(2));
        let s = LinSystem::new(ctx(), vec![sc(t(0).inv()), sc(k(0))]).unwrap();
        assert_eq!(classify(&s).unwrap().descriptor, Descriptor::Trivial);
    }

    #[test]
    fn reduced_forms_agree() {
        use crate::system::kolchin_reduce;
        for sign in [-1, 1] {
            let s = rotation_family(sign);
            let r = kolchin_reduce(&s).unwrap().to_system();
            assert_eq!(classify(&s).unwrap(), classify(&r).unwrap());
        }
        let sc = |f: RatFunc| Matrix::from_rows(vec![vec![f]]).unwrap();
        let s7 = LinSystem::new(ctx(), vec![sc(t(1)), sc(t(0))]).unwrap();
        let r7 = kolchin_reduce(&s7).unwrap().to_system();
        assert_eq!(classify(&s7).unwrap(), classify(&r7).unwrap());
    }

    #[test]
    fn euler() {
        let e = classify_euler(&rat_int(1));
        assert_eq!(e.class.descriptor, Descriptor::SplitTorus(1));
        let (r1, r2) = e.roots.clone().unwrap();
        assert_eq!(r1.to_string(), "(1+sqrt(5))/2");
        assert_eq!(&r1 + &r2, QuadScalar::one());
        assert_eq!(&r1 * &r2, QuadScalar::from_int(-1));
        assert_eq!(classify_euler(&rat_int(6)).class.descriptor, Descriptor::Trivial);
        assert_eq!(classify_euler(&rat(-1, 2)).class.to_string(), "SO2");
        assert_eq!(classify_euler(&rat(3, 4)).class.descriptor, Descriptor::FiniteCyclic(2));
        assert_eq!(classify_euler(&rat(-1, 4)).class.to_string(), "Product(Cyclic(2), Ga)");
    }

    #[test]
    fn rendering() {
        let d = Descriptor::Product(vec![Descriptor::SplitTorus(1), Descriptor::NonSplitTorus { so2_blocks: 1, split_dim: 0 }]).normalize();
        assert_eq!(d.to_string(), "NonSplitTorus(SO2, Gm)");
        assert!(!d.real_split());
        assert_eq!(Descriptor::Product(vec![Descriptor::Trivial]).normalize(), Descriptor::Trivial);
    }
}
