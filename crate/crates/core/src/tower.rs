//! Differential extension towers.
//!
//! A tower lays its variables out as `[base vars..., generators...]`. Elements
//! are [`RatFunc`]s over that layout, kept reduced modulo the relations of the
//! algebraic and rotation steps. Each derivation is stored as its images on
//! every variable, which covers both the partial derivations `d/dt_i` and the
//! single Kolchin derivation `D` (`D t_k = u_k`, `D u_k = 0`).

use std::fmt;

use crate::error::TowerError;
use crate::matrix::Matrix;
use crate::poly::MultiPoly;
use crate::ratfunc::{self, DiffContext, RatFunc};
use crate::scalar::QuadScalar;
use crate::system::{check_integrability, default_u_names, Integrability, LinSystem};

/// A tower element: a rational function over the tower's variable layout.
pub type TowerElem = RatFunc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Check {
    Yes,
    No,
    Assumed,
    NotApplicable,
}

impl Check {
    pub fn as_str(self) -> &'static str {
        match self {
            Check::Yes => "yes",
            Check::No => "no",
            Check::Assumed => "assumed",
            Check::NotApplicable => "n/a",
        }
    }
}

/// Advisory checks recorded when a step is appended.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StepFlags {
    /// Integral steps: every nonzero component was shown not to be a
    /// derivative (`Yes`), one was shown to be one (`No`), or some component
    /// could not be decided (`Assumed`).
    pub nonderivative: Check,
    /// Integral steps: whether the coefficient vector is a gradient in the
    /// field below, when decidable.
    pub vector_exact: Option<bool>,
    /// Algebraic steps: irreducibility of the minimal polynomial.
    pub irreducibility: Check,
    /// Indices of zero coefficients.
    pub zero_components: Vec<usize>,
}

impl StepFlags {
    fn blank() -> Self {
        StepFlags {
            nonderivative: Check::NotApplicable,
            vector_exact: None,
            irreducibility: Check::NotApplicable,
            zero_components: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum StepKind {
    /// `d_k a = a_k`.
    Integral(Vec<TowerElem>),
    /// `d_k e = b_k e`.
    ExpIntegral(Vec<TowerElem>),
    /// Monic minimal polynomial, coefficients `c_0..c_{n-1}` (leading one
    /// implied).
    Algebraic(Vec<TowerElem>),
    /// `d_k s = g_k c`, `d_k c = -g_k s`, `s^2 + c^2 = 1`.
    RotationPair(Vec<TowerElem>),
}

impl StepKind {
    pub fn tag(&self) -> &'static str {
        match self {
            StepKind::Integral(_) => "integral",
            StepKind::ExpIntegral(_) => "expintegral",
            StepKind::Algebraic(_) => "algebraic",
            StepKind::RotationPair(_) => "rotationpair",
        }
    }

    pub fn coefficients(&self) -> &[TowerElem] {
        match self {
            StepKind::Integral(v) | StepKind::ExpIntegral(v) | StepKind::Algebraic(v) | StepKind::RotationPair(v) => v,
        }
    }

    fn generator_count(&self) -> usize {
        if matches!(self, StepKind::RotationPair(_)) {
            2
        } else {
            1
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TowerStep {
    names: Vec<String>,
    kind: StepKind,
    flags: StepFlags,
    level: usize,
}

impl TowerStep {
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn kind(&self) -> &StepKind {
        &self.kind
    }

    pub fn flags(&self) -> &StepFlags {
        &self.flags
    }

    /// Number of variables below the step; its coefficients live over them.
    pub fn level(&self) -> usize {
        self.level
    }
}

/// `delta * v^degree = lower`, with `delta` and `lower` free of `v` and
/// `lower` of lower degree in `v`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Relation {
    pub var: usize,
    pub degree: u32,
    pub delta: MultiPoly,
    pub lower: MultiPoly,
}

impl Relation {
    /// The relation as the polynomial `delta * v^degree - lower`.
    pub fn polynomial(&self) -> MultiPoly {
        let n = self.delta.nvars();
        let mut e = vec![0; n];
        e[self.var] = self.degree;
        &self.delta.mul_monomial(&e, &QuadScalar::one()) - &self.lower
    }

    fn pad(&self, n: usize) -> Self {
        Relation { var: self.var, degree: self.degree, delta: self.delta.pad_vars(n), lower: self.lower.pad_vars(n) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tower {
    base: DiffContext,
    kolchin_m: Option<usize>,
    names: Vec<String>,
    images: Vec<Vec<RatFunc>>,
    steps: Vec<TowerStep>,
    relations: Vec<Relation>,
}

fn identity_images(nvars: usize, derivations: usize) -> Vec<Vec<RatFunc>> {
    (0..derivations)
        .map(|i| (0..nvars).map(|v| if v == i { RatFunc::one(nvars) } else { RatFunc::zero(nvars) }).collect())
        .collect()
}

impl Tower {
    /// The base field with the partial derivations `d/dt_i` of `base`; any
    /// non-differential variables of `base` are constants.
    pub fn new(base: DiffContext) -> Self {
        let n = base.nvars();
        let images = identity_images(n, base.derivation_count());
        Tower { names: base.vars().to_vec(), base, kolchin_m: None, images, steps: Vec::new(), relations: Vec::new() }
    }

    /// The base field `K(u_1..u_m)` with the single derivation
    /// `D = sum u_k d/dt_k`; `base` holds `t_1..t_m, u_1..u_m`.
    pub fn new_kolchin(base: DiffContext, m: usize) -> Self {
        let n = base.nvars();
        assert_eq!(n, 2 * m, "Kolchin base needs t and u blocks");
        let images = vec![(0..n).map(|v| if v < m { RatFunc::var(n, m + v) } else { RatFunc::zero(n) }).collect()];
        Tower { names: base.vars().to_vec(), base, kolchin_m: Some(m), images, steps: Vec::new(), relations: Vec::new() }
    }

    pub fn base(&self) -> &DiffContext {
        &self.base
    }

    pub fn kolchin_m(&self) -> Option<usize> {
        self.kolchin_m
    }

    pub fn base_len(&self) -> usize {
        self.base.nvars()
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn derivation_count(&self) -> usize {
        self.images.len()
    }

    pub fn steps(&self) -> &[TowerStep] {
        &self.steps
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn generator_names(&self) -> &[String] {
        &self.names[self.base_len()..]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Parsing context over every variable of the tower.
    pub fn ctx(&self) -> DiffContext {
        DiffContext::new(self.names.clone(), self.base.radicand().cloned()).expect("names are distinct")
    }

    /// Parsing context over the variables below `level`.
    pub fn ctx_below(&self, level: usize) -> DiffContext {
        DiffContext::new(self.names[..level].to_vec(), self.base.radicand().cloned()).expect("names are distinct")
    }

    pub fn var(&self, name: &str) -> Option<TowerElem> {
        self.index_of(name).map(|i| RatFunc::var(self.nvars(), i))
    }

    pub fn constant(&self, c: QuadScalar) -> TowerElem {
        RatFunc::constant(self.nvars(), c)
    }

    /// Image of variable `v` under derivation `i`.
    pub fn image(&self, i: usize, v: usize) -> &RatFunc {
        &self.images[i][v]
    }

    /// Pads an element built over a lower level of the tower.
    pub fn lift(&self, x: &RatFunc) -> RatFunc {
        assert!(x.nvars() <= self.nvars(), "element has more variables than the tower");
        x.pad_vars(self.nvars())
    }

    /// The same base with no steps.
    pub fn base_tower(&self) -> Tower {
        let nb = self.base_len();
        let images = self
            .images
            .iter()
            .map(|row| {
                row[..nb]
                    .iter()
                    .map(|f| {
                        let (num, den) = (f.num(), f.den());
                        RatFunc::new(truncate(num, nb), truncate(den, nb))
                    })
                    .collect()
            })
            .collect();
        Tower {
            base: self.base.clone(),
            kolchin_m: self.kolchin_m,
            names: self.names[..nb].to_vec(),
            images,
            steps: Vec::new(),
            relations: Vec::new(),
        }
    }

    fn reduce_poly(&self, p: &MultiPoly) -> (MultiPoly, MultiPoly) {
        let n = p.nvars();
        let mut p = p.clone();
        let mut mult = MultiPoly::one(n);
        for rel in self.relations.iter().rev() {
            let rel = if rel.delta.nvars() == n { rel.clone() } else { rel.pad(n) };
            loop {
                let deg = p.degree_in(rel.var);
                if deg < rel.degree {
                    break;
                }
                let top = p.split_by_var(rel.var).remove(&deg).expect("top coefficient");
                let mut e = vec![0; n];
                e[rel.var] = deg;
                let rest = &p - &top.mul_monomial(&e, &QuadScalar::one());
                e[rel.var] = deg - rel.degree;
                let shifted = &top.mul_monomial(&e, &QuadScalar::one()) * &rel.lower;
                if rel.delta.is_one() {
                    p = &rest + &shifted;
                } else {
                    p = &(&rest * &rel.delta) + &shifted;
                    mult = &mult * &rel.delta;
                }
            }
        }
        (p, mult)
    }

    /// Normal form modulo the relations; `None` when the denominator vanishes.
    pub fn try_reduce(&self, x: &RatFunc) -> Option<TowerElem> {
        let x = self.lift(x);
        if self.relations.is_empty() {
            return Some(x);
        }
        let (nr, mn) = self.reduce_poly(x.num());
        if nr.is_zero() {
            return Some(RatFunc::zero(self.nvars()));
        }
        let (dr, md) = self.reduce_poly(x.den());
        if dr.is_zero() {
            return None;
        }
        if mn.is_one() && md.is_one() {
            return Some(RatFunc::new(nr, dr));
        }
        Some(RatFunc::new(&nr * &md, &dr * &mn))
    }

    pub fn reduce(&self, x: &RatFunc) -> TowerElem {
        self.try_reduce(x).expect("denominator vanishes modulo the tower relations")
    }

    pub fn is_zero(&self, x: &RatFunc) -> bool {
        let x = self.lift(x);
        if self.relations.is_empty() {
            return x.is_zero();
        }
        self.reduce_poly(x.num()).0.is_zero()
    }

    pub fn equals(&self, x: &RatFunc, y: &RatFunc) -> bool {
        self.is_zero(&(&self.lift(x) - &self.lift(y)))
    }

    pub fn mul(&self, x: &RatFunc, y: &RatFunc) -> TowerElem {
        self.reduce(&(&self.lift(x) * &self.lift(y)))
    }

    pub fn div(&self, x: &RatFunc, y: &RatFunc) -> TowerElem {
        assert!(!self.is_zero(y), "division by zero in tower");
        self.reduce(&(&self.lift(x) / &self.lift(y)))
    }

    fn derive_poly(&self, p: &MultiPoly, i: usize) -> RatFunc {
        let n = p.nvars();
        let mut acc = RatFunc::zero(n);
        for v in 0..n {
            let img = &self.images[i][v];
            if img.is_zero() || !p.depends_on(v) {
                continue;
            }
            acc = &acc + &(&RatFunc::from_poly(p.partial(v)) * img);
        }
        acc
    }

    /// The `i`-th derivation of `x`, reduced. The input is not reduced first,
    /// so applying this to a relation polynomial tests consistency.
    pub fn derive_elem(&self, x: &RatFunc, i: usize) -> TowerElem {
        let x = self.lift(x);
        let dn = self.derive_poly(x.num(), i);
        if x.den().is_one() {
            return self.reduce(&dn);
        }
        let dd = self.derive_poly(x.den(), i);
        let den = RatFunc::from_poly(x.den().clone());
        let num = RatFunc::from_poly(x.num().clone());
        let out = &(&(&dn * &den) - &(&num * &dd)) / &(&den * &den);
        self.reduce(&out)
    }

    pub fn derive_matrix(&self, m: &Matrix, i: usize) -> Matrix {
        m.map(|e| self.derive_elem(e, i))
    }

    /// Whether every derivation kills `x`.
    pub fn is_constant(&self, x: &RatFunc) -> bool {
        (0..self.derivation_count()).all(|i| self.derive_elem(x, i).is_zero())
    }

    /// The relation polynomials as elements (each is zero in the tower).
    pub fn relation_polys(&self) -> Vec<RatFunc> {
        self.relations.iter().map(|r| RatFunc::from_poly(r.polynomial().pad_vars(self.nvars()))).collect()
    }

    fn prepare_coefficients(&self, name: &str, coeffs: &[RatFunc]) -> Result<Vec<RatFunc>, TowerError> {
        let n = self.nvars();
        coeffs
            .iter()
            .map(|c| {
                if c.nvars() > n {
                    if (n..c.nvars()).any(|v| c.depends_on(v)) {
                        return Err(TowerError::CoefficientOutsideField(name.to_string()));
                    }
                    let (num, den) = (truncate(c.num(), n), truncate(c.den(), n));
                    return Ok(self.reduce(&RatFunc::new(num, den)));
                }
                self.try_reduce(c).ok_or_else(|| TowerError::DegenerateStep(name.into(), "coefficient has a vanishing denominator".into()))
            })
            .collect()
    }

    fn check_vector(&self, name: &str, v: &[RatFunc]) -> Result<(), TowerError> {
        let m = self.derivation_count();
        if v.len() != m {
            return Err(TowerError::DegenerateStep(
                name.into(),
                format!("expected {m} coefficients (one per derivation), got {}", v.len()),
            ));
        }
        for i in 0..m {
            for j in (i + 1)..m {
                let lhs = self.derive_elem(&v[j], i);
                let rhs = self.derive_elem(&v[i], j);
                if !self.equals(&lhs, &rhs) {
                    return Err(TowerError::CompatibilityViolation { step: name.into(), i, j });
                }
            }
        }
        if v.iter().all(|c| self.is_zero(c)) {
            return Err(TowerError::DegenerateStep(name.into(), "zero coefficient vector adjoins a constant".into()));
        }
        Ok(())
    }

    fn check_names(&self, names: &[String]) -> Result<(), TowerError> {
        for (k, n) in names.iter().enumerate() {
            if !crate::sysio::is_identifier(n) || self.names.contains(n) || names[..k].contains(n) {
                return Err(TowerError::NameClash(n.clone()));
            }
        }
        Ok(())
    }

    /// A fresh generator name derived from `stem`.
    pub fn fresh_name(&self, stem: &str) -> String {
        let mut name = stem.to_string();
        while self.names.contains(&name) {
            name.push('_');
        }
        name
    }

    /// Integral step: flags from Hermite reduction where decidable.
    fn integral_flags(&self, a: &[RatFunc]) -> StepFlags {
        let mut flags = StepFlags::blank();
        let nb = self.base_len();
        let mut any_derivative = false;
        let mut any_assumed = false;
        let kolchin = self.kolchin_m.is_some();
        for (k, ak) in a.iter().enumerate() {
            if ak.is_zero() {
                flags.zero_components.push(k);
                continue;
            }
            if kolchin {
                any_assumed = true;
                continue;
            }
            let only_base = (nb..self.nvars()).all(|v| !ak.depends_on(v));
            let var_k = k;
            if only_base && !ak.depends_on(var_k) {
                // t_k * a_k is an antiderivative
                any_derivative = true;
            } else if only_base && (0..self.nvars()).all(|v| v == var_k || !ak.depends_on(v)) {
                match ratfunc::is_derivative_univariate(ak, var_k) {
                    Ok(true) => any_derivative = true,
                    Ok(false) => {}
                    Err(_) => any_assumed = true,
                }
            } else {
                any_assumed = true;
            }
        }
        flags.nonderivative = if any_derivative {
            Check::No
        } else if any_assumed {
            Check::Assumed
        } else {
            Check::Yes
        };
        // a component that is not a d_k-derivative rules out a gradient
        let one_fails = !kolchin
            && a.iter().enumerate().any(|(k, ak)| {
                !ak.is_zero()
                    && (nb..self.nvars()).all(|v| !ak.depends_on(v))
                    && (0..self.nvars()).all(|v| v == k || !ak.depends_on(v))
                    && matches!(ratfunc::is_derivative_univariate(ak, k), Ok(false))
            });
        flags.vector_exact = if one_fails {
            Some(false)
        } else if !kolchin && a.iter().all(|c| (nb..self.nvars()).all(|v| !c.depends_on(v))) {
            let base: Vec<RatFunc> = a.iter().map(|c| RatFunc::new(truncate(c.num(), nb), truncate(c.den(), nb))).collect();
            match ratfunc::antiderive_poly(&base) {
                Ok(Some(_)) => Some(true),
                _ => None,
            }
        } else {
            None
        };
        flags
    }

    fn push_generator(&mut self, name: String) {
        let n = self.nvars() + 1;
        self.names.push(name);
        for row in &mut self.images {
            for f in row.iter_mut() {
                *f = f.pad_vars(n);
            }
            row.push(RatFunc::zero(n));
        }
        for r in &mut self.relations {
            *r = r.pad(n);
        }
    }

    /// Appends a step. `names` holds one generator name, or two (`s`, `c`)
    /// for a rotation pair.
    pub fn extend(&self, names: &[&str], kind: StepKind) -> Result<Tower, TowerError> {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let first = names.first().cloned().unwrap_or_default();
        if names.len() != kind.generator_count() {
            return Err(TowerError::DegenerateStep(
                first,
                format!("{} step takes {} generator name(s)", kind.tag(), kind.generator_count()),
            ));
        }
        self.check_names(&names)?;
        let level = self.nvars();
        let coeffs = self.prepare_coefficients(&first, kind.coefficients())?;
        let mut flags = StepFlags::blank();
        let mut t = self.clone();
        match &kind {
            StepKind::Integral(_) | StepKind::ExpIntegral(_) | StepKind::RotationPair(_) => {
                self.check_vector(&first, &coeffs)?;
                if matches!(kind, StepKind::Integral(_)) {
                    flags = self.integral_flags(&coeffs);
                } else {
                    flags.zero_components = (0..coeffs.len()).filter(|&k| coeffs[k].is_zero()).collect();
                }
            }
            StepKind::Algebraic(_) => {
                if coeffs.is_empty() {
                    return Err(TowerError::DegenerateStep(first, "minimal polynomial has degree 0".into()));
                }
                if coeffs.len() == 1 {
                    return Err(TowerError::DegenerateStep(first, "degree 1 adjoins an element of the field".into()));
                }
                flags.irreducibility = self.irreducibility(&first, &coeffs)?;
            }
        }
        match &kind {
            StepKind::Integral(_) => {
                t.push_generator(first.clone());
                let n = t.nvars();
                for (i, a) in coeffs.iter().enumerate() {
                    t.images[i][level] = a.pad_vars(n);
                }
                t.steps.push(TowerStep { names, kind: StepKind::Integral(coeffs), flags, level });
            }
            StepKind::ExpIntegral(_) => {
                t.push_generator(first.clone());
                let n = t.nvars();
                let e = RatFunc::var(n, level);
                for (i, b) in coeffs.iter().enumerate() {
                    t.images[i][level] = &b.pad_vars(n) * &e;
                }
                t.steps.push(TowerStep { names, kind: StepKind::ExpIntegral(coeffs), flags, level });
            }
            StepKind::RotationPair(_) => {
                t.push_generator(names[0].clone());
                t.push_generator(names[1].clone());
                let n = t.nvars();
                let (s, c) = (RatFunc::var(n, level), RatFunc::var(n, level + 1));
                for (i, g) in coeffs.iter().enumerate() {
                    let g = g.pad_vars(n);
                    t.images[i][level] = &g * &c;
                    t.images[i][level + 1] = -(&g * &s);
                }
                let s2 = MultiPoly::var(n, level).pow(2);
                t.relations.push(Relation {
                    var: level + 1,
                    degree: 2,
                    delta: MultiPoly::one(n),
                    lower: &MultiPoly::one(n) - &s2,
                });
                t.steps.push(TowerStep { names, kind: StepKind::RotationPair(coeffs), flags, level });
            }
            StepKind::Algebraic(_) => {
                let deg = coeffs.len() as u32;
                if let Some(v) = algebraic_var_in_denominators(self, &coeffs) {
                    return Err(TowerError::UnsupportedStep(format!(
                        "{first} (coefficient denominators involve the algebraic generator {})",
                        self.names[v]
                    )));
                }
                t.push_generator(first.clone());
                let n = t.nvars();
                let dens: Vec<MultiPoly> = coeffs.iter().map(|c| c.den().pad_vars(n)).collect();
                let mut delta = MultiPoly::one(n);
                for d in &dens {
                    if delta.try_div_exact(d).is_none() {
                        delta = &delta * d;
                    }
                }
                let mut lower = MultiPoly::zero(n);
                for (j, c) in coeffs.iter().enumerate() {
                    let scaled = delta.try_div_exact(&c.den().pad_vars(n)).expect("common denominator");
                    let mut e = vec![0; n];
                    e[level] = j as u32;
                    lower = &lower - &(&scaled * &c.num().pad_vars(n)).mul_monomial(&e, &QuadScalar::one());
                }
                t.relations.push(Relation { var: level, degree: deg, delta, lower });
                let alpha = RatFunc::var(n, level);
                for i in 0..t.derivation_count() {
                    let mut p_d = RatFunc::zero(n);
                    let mut p_prime = &RatFunc::from_int(n, deg as i64) * &alpha.pow(deg as i32 - 1);
                    for (j, c) in coeffs.iter().enumerate() {
                        let aj = alpha.pow(j as i32);
                        p_d = &p_d + &(&self.derive_elem(c, i).pad_vars(n) * &aj);
                        if j > 0 {
                            p_prime = &p_prime + &(&(&c.pad_vars(n) * &RatFunc::from_int(n, j as i64)) * &alpha.pow(j as i32 - 1));
                        }
                    }
                    let img = t.reduce(&(-(&p_d / &p_prime)));
                    t.images[i][level] = img;
                }
                t.steps.push(TowerStep { names, kind: StepKind::Algebraic(coeffs), flags, level });
            }
        }
        Ok(t)
    }

    fn irreducibility(&self, name: &str, coeffs: &[RatFunc]) -> Result<Check, TowerError> {
        if coeffs.len() != 2 {
            return Ok(Check::Assumed);
        }
        let n = self.nvars();
        let four = RatFunc::from_int(n, 4);
        let disc = self.reduce(&(&(&coeffs[1] * &coeffs[1]) - &(&four * &coeffs[0])));
        if (self.base_len()..n).any(|v| disc.depends_on(v)) {
            return Ok(Check::Assumed);
        }
        if let Some(c) = disc.as_constant() {
            return if c.sign() < 0 { Ok(Check::Yes) } else { Err(TowerError::ReducibleMinimalPolynomial(name.into())) };
        }
        let p = disc.num() * disc.den();
        let lc = p.leading().map(|(_, c)| c.clone()).expect("nonzero discriminant");
        if lc.sign() < 0 {
            return Ok(Check::Yes);
        }
        match p.scale(&lc.inv()).sqrt_exact() {
            Some(_) => Err(TowerError::ReducibleMinimalPolynomial(name.into())),
            None => Ok(Check::Yes),
        }
    }

    /// Appends constant variables after every generator (their images are
    /// zero). Used to evaluate `D = sum u_k d_k` on tower elements.
    pub fn append_constants(&self, names: &[String]) -> Result<Tower, TowerError> {
        self.check_names(names)?;
        let mut t = self.clone();
        for n in names {
            t.push_generator(n.clone());
        }
        Ok(t)
    }
}

fn truncate(p: &MultiPoly, n: usize) -> MultiPoly {
    let map: Vec<usize> = (0..p.nvars()).map(|v| v.min(n.saturating_sub(1))).collect();
    debug_assert!((n..p.nvars()).all(|v| !p.depends_on(v)));
    if p.nvars() == n {
        return p.clone();
    }
    p.remap(&map, n)
}

fn algebraic_var_in_denominators(t: &Tower, coeffs: &[RatFunc]) -> Option<usize> {
    t.relations.iter().map(|r| r.var).find(|&v| coeffs.iter().any(|c| c.den().depends_on(v)))
}

/// Reads a minimal polynomial in variable `var` (the new generator, last in
/// the layout) and returns its monic coefficients over the variables below.
pub fn algebraic_coefficients(p: &RatFunc, var: usize, name: &str) -> Result<Vec<RatFunc>, TowerError> {
    if p.den().depends_on(var) {
        return Err(TowerError::CoefficientOutsideField(name.into()));
    }
    let n = p.nvars();
    let parts = p.num().split_by_var(var);
    let deg = *parts.keys().next_back().unwrap_or(&0);
    if deg == 0 {
        return Err(TowerError::DegenerateStep(name.into(), "minimal polynomial has degree 0".into()));
    }
    let den = RatFunc::from_poly(p.den().clone());
    let lead = &RatFunc::from_poly(parts[&deg].clone()) / &den;
    let mut out = Vec::new();
    for k in 0..deg {
        let c = parts.get(&k).cloned().unwrap_or_else(|| MultiPoly::zero(n));
        let c = &(&RatFunc::from_poly(c) / &den) / &lead;
        out.push(RatFunc::new(truncate(c.num(), var), truncate(c.den(), var)));
    }
    Ok(out)
}

/// An entry where `d_j M` and `A_j M` disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntryFailure {
    pub derivation: usize,
    pub row: usize,
    pub col: usize,
    pub lhs: TowerElem,
    pub rhs: TowerElem,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub ok: bool,
    pub problem: Option<String>,
    pub failures: Vec<EntryFailure>,
    pub det: Option<TowerElem>,
    pub det_nonzero: bool,
    /// Generators and matrix entries killed by every derivation that are
    /// not base scalars.
    pub new_constants: Vec<String>,
}

impl VerifyReport {
    fn rejected(problem: String) -> Self {
        VerifyReport { ok: false, problem: Some(problem), failures: Vec::new(), det: None, det_nonzero: false, new_constants: Vec::new() }
    }
}

/// Determinant by Gaussian elimination with tower zero tests.
pub fn determinant(t: &Tower, m: &Matrix) -> TowerElem {
    let r = m.nrows();
    let mut a: Vec<Vec<RatFunc>> = m.to_rows().into_iter().map(|row| row.iter().map(|e| t.reduce(e)).collect()).collect();
    let mut det = t.constant(QuadScalar::one());
    for col in 0..r {
        let Some(p) = (col..r).find(|&i| !t.is_zero(&a[i][col])) else {
            return RatFunc::zero(t.nvars());
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        let pivot = a[col][col].clone();
        det = t.mul(&det, &pivot);
        for i in (col + 1)..r {
            if t.is_zero(&a[i][col]) {
                continue;
            }
            let f = t.div(&a[i][col], &pivot);
            for j in col..r {
                let v = &a[i][j] - &(&f * &a[col][j]);
                a[i][j] = t.reduce(&v);
            }
        }
    }
    det
}

/// Checks `d_j M = A_j M` for every derivation and `det M != 0`.
pub fn verify_fundamental(t: &Tower, s: &LinSystem, m: &Matrix) -> VerifyReport {
    if s.ctx().vars() != t.base().vars() {
        return VerifyReport::rejected(format!(
            "system variables [{}] differ from tower base [{}]",
            s.ctx().vars().join(", "),
            t.base().vars().join(", ")
        ));
    }
    if s.derivation_count() != t.derivation_count() {
        return VerifyReport::rejected("system and tower have different numbers of derivations".into());
    }
    let r = s.rank();
    if m.nrows() != r || m.ncols() != r {
        return VerifyReport::rejected(format!("matrix is {}x{}, system rank is {r}", m.nrows(), m.ncols()));
    }
    if m.nvars() > t.nvars() {
        return VerifyReport::rejected("matrix entries use variables outside the tower".into());
    }
    let n = t.nvars();
    let m = m.map(|e| t.reduce(&e.pad_vars(n)));
    let mut failures = Vec::new();
    for j in 0..s.derivation_count() {
        let lhs = t.derive_matrix(&m, j);
        let rhs = s.matrix(j).pad_vars(n).mul(&m).map(|e| t.reduce(e));
        for row in 0..r {
            for col in 0..r {
                if !t.equals(lhs.get(row, col), rhs.get(row, col)) {
                    failures.push(EntryFailure {
                        derivation: j,
                        row,
                        col,
                        lhs: lhs.get(row, col).clone(),
                        rhs: rhs.get(row, col).clone(),
                    });
                }
            }
        }
    }
    let det = determinant(t, &m);
    let det_nonzero = !t.is_zero(&det);
    let mut new_constants = Vec::new();
    for (k, name) in t.generator_names().iter().enumerate() {
        let v = RatFunc::var(n, t.base_len() + k);
        if t.is_constant(&v) {
            new_constants.push(name.clone());
        }
    }
    for row in 0..r {
        for col in 0..r {
            let e = m.get(row, col);
            if e.as_constant().is_none() && t.is_constant(e) {
                new_constants.push(format!("entry ({}, {})", row + 1, col + 1));
            }
        }
    }
    VerifyReport { ok: failures.is_empty() && det_nonzero, problem: None, failures, det: Some(det), det_nonzero, new_constants }
}

/// `D M = A_D M` with `D = sum u_k d_k`, evaluated on the tower extended by
/// constant `u` variables.
pub fn kolchin_holds(t: &Tower, s: &LinSystem, m: &Matrix) -> bool {
    let mm = s.derivation_count();
    let u: Vec<String> = default_u_names(mm).into_iter().map(|n| t.fresh_name(&n)).collect();
    let Ok(lifted) = t.append_constants(&u) else {
        return false;
    };
    let n = lifted.nvars();
    let m = m.pad_vars(n);
    let r = s.rank();
    let mut dm = Matrix::zeros(r, r, n);
    let mut a_d = Matrix::zeros(r, r, n);
    for k in 0..mm {
        let uk = RatFunc::var(n, t.nvars() + k);
        dm = dm.add(&lifted.derive_matrix(&m, k).scale(&uk));
        a_d = a_d.add(&s.matrix(k).pad_vars(n).scale(&uk));
    }
    let rhs = a_d.mul(&m);
    (0..r).all(|i| (0..r).all(|j| lifted.equals(dm.get(i, j), rhs.get(i, j))))
}

/// Map from the layout `[t, generators, u]` (a tower with constants appended)
/// to the layout `[t, u, generators]` of the reduced tower.
pub fn lifted_to_reduced_map(t: &Tower) -> Vec<usize> {
    let nb = t.base_len();
    let n = t.nvars();
    let m = t.derivation_count();
    (0..n + m).map(|v| if v < nb { v } else if v < n { v + m } else { nb + (v - n) }).collect()
}

/// Kolchin reduction of a tower: each vector step becomes the single
/// coefficient `sum u_k a_k` over `K(u)`.
pub fn reduce_tower(t: &Tower) -> Result<Tower, TowerError> {
    let m = t.derivation_count();
    if t.kolchin_m.is_some() || t.base.nvars() != m {
        return Err(TowerError::UnsupportedStep("tower is not over a partial base field".into()));
    }
    let u = default_u_names(m);
    let base = t.base.extend_constants(u.clone()).map_err(|_| TowerError::NameClash(u[0].clone()))?;
    let mut out = Tower::new_kolchin(base, m);
    for step in &t.steps {
        let level = step.level;
        let n_out = out.nvars();
        // variables below the step: t keep their place, generators shift past u
        let map: Vec<usize> = (0..level).map(|v| if v < m { v } else { v + m }).collect();
        let coeffs: Vec<RatFunc> = step.kind.coefficients().iter().map(|c| c.remap(&map, n_out)).collect();
        let combine = |cs: &[RatFunc]| {
            let mut acc = RatFunc::zero(n_out);
            for (k, c) in cs.iter().enumerate() {
                acc = &acc + &(&RatFunc::var(n_out, m + k) * c);
            }
            vec![acc]
        };
        let names: Vec<&str> = step.names.iter().map(String::as_str).collect();
        let kind = match &step.kind {
            StepKind::Integral(_) => StepKind::Integral(combine(&coeffs)),
            StepKind::ExpIntegral(_) => StepKind::ExpIntegral(combine(&coeffs)),
            StepKind::Algebraic(_) => StepKind::Algebraic(coeffs),
            StepKind::RotationPair(_) => return Err(TowerError::UnsupportedStep(step.names.join(", "))),
        };
        out = out.extend(&names, kind)?;
    }
    Ok(out)
}

/// The subfield generated by `E^n` for a tower with a single exponential
/// step: one step with coefficients scaled by `n`.
pub fn fixed_subfield_power(t: &Tower, n: u32) -> Result<Tower, TowerError> {
    assert!(n > 0, "power must be positive");
    let step = match t.steps.as_slice() {
        [s] if matches!(s.kind, StepKind::ExpIntegral(_)) => s,
        _ => return Err(TowerError::UnsupportedStep("expected exactly one exponential step".into())),
    };
    if n == 1 {
        return Ok(t.clone());
    }
    let base = t.base_tower();
    let k = RatFunc::from_int(base.nvars(), n as i64);
    let coeffs = step.kind.coefficients().iter().map(|b| &k * b).collect();
    let name = base.fresh_name(&format!("{}{}", step.names[0], n));
    base.extend(&[&name], StepKind::ExpIntegral(coeffs))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TowerVerdict {
    Liouvillian,
    GeneralisedLiouvillian,
    NotCertified(String),
}

impl fmt::Display for TowerVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TowerVerdict::Liouvillian => write!(f, "Liouvillian"),
            TowerVerdict::GeneralisedLiouvillian => write!(f, "GeneralisedLiouvillian"),
            TowerVerdict::NotCertified(r) => write!(f, "NotCertified({r:?})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepReport {
    pub names: Vec<String>,
    pub kind: &'static str,
    pub flags: StepFlags,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub verdict: TowerVerdict,
    pub steps: Vec<StepReport>,
}

pub fn certify_tower(t: &Tower) -> Certificate {
    let mut verdict = TowerVerdict::Liouvillian;
    let mut steps = Vec::new();
    for s in &t.steps {
        let note = match &s.kind {
            StepKind::Integral(_) => "integral".to_string(),
            StepKind::ExpIntegral(_) => "exponential of an integral".to_string(),
            StepKind::Algebraic(c) => {
                if verdict == TowerVerdict::Liouvillian {
                    verdict = TowerVerdict::GeneralisedLiouvillian;
                }
                format!("algebraic of degree {}", c.len())
            }
            StepKind::RotationPair(_) => {
                if !matches!(verdict, TowerVerdict::NotCertified(_)) {
                    verdict = TowerVerdict::NotCertified(format!("non-split rotation step ({})", s.names.join(", ")));
                }
                "non-split rotation step".to_string()
            }
        };
        steps.push(StepReport { names: s.names.clone(), kind: s.kind.tag(), flags: s.flags.clone(), note });
    }
    Certificate { verdict, steps }
}

/// Integer exponents `e` with `b_k = e_k / t_k`, i.e. `b` is the logarithmic
/// gradient of the monomial `prod t_k^e_k`.
fn monomial_solution(t: &Tower, b: &[RatFunc]) -> Option<RatFunc> {
    let n = t.nvars();
    let m = t.derivation_count();
    if t.kolchin_m.is_some() || t.base_len() < m {
        return None;
    }
    let mut h = RatFunc::one(n);
    for (k, bk) in b.iter().enumerate() {
        let e = &(&t.lift(bk) * &RatFunc::var(n, k));
        let c = e.as_constant()?;
        let r = c.to_rat()?;
        if !r.is_integer() {
            return None;
        }
        let ek: i32 = r.to_integer().try_into().ok()?;
        if ek != 0 {
            h = &h * &RatFunc::var(n, k).pow(ek);
        }
    }
    (0..m).all(|k| t.equals(&t.derive_elem(&h, k), &t.mul(&b[k], &h))).then_some(h)
}

/// Solves an integrable upper-triangular system by quadratures, returning a
/// tower of integral and exponential steps and an upper-triangular
/// fundamental matrix over it.
pub fn solve_triangular(s: &LinSystem) -> Result<(Tower, Matrix), TowerError> {
    if !s.is_upper_triangular() {
        return Err(TowerError::NotTriangular);
    }
    if let Integrability::Witness { i, j, .. } = check_integrability(s) {
        return Err(TowerError::NotIntegrable(i, j));
    }
    let mut t = match s.derivations() {
        crate::system::Derivations::Partial => Tower::new(s.ctx().clone()),
        crate::system::Derivations::Kolchin { m } => Tower::new_kolchin(s.ctx().clone(), *m),
    };
    let r = s.rank();
    let md = s.derivation_count();
    // diagonal
    let mut diag: Vec<RatFunc> = Vec::with_capacity(r);
    let mut seen: Vec<(Vec<RatFunc>, usize)> = Vec::new();
    for i in 0..r {
        let b: Vec<RatFunc> = (0..md).map(|k| s.matrix(k).get(i, i).clone()).collect();
        if b.iter().all(RatFunc::is_zero) {
            diag.push(RatFunc::one(s.ctx().nvars()));
            continue;
        }
        if let Some(h) = monomial_solution(&t, &b) {
            diag.push(h);
            continue;
        }
        if let Some((_, k)) = seen.iter().find(|(v, _)| v.iter().zip(&b).all(|(x, y)| x.equals(y))) {
            diag.push(diag[*k].clone());
            continue;
        }
        let name = t.fresh_name(&format!("E{}", i + 1));
        t = t.extend(&[&name], StepKind::ExpIntegral(b.clone()))?;
        diag.push(t.var(&name).expect("new generator"));
        seen.push((b, i));
    }
    let mut cols: Vec<Vec<RatFunc>> = vec![Vec::new(); r];
    for j in 0..r {
        let n = t.nvars();
        let mut col = vec![RatFunc::zero(n); r];
        col[j] = diag[j].pad_vars(n);
        cols[j] = col;
    }
    for j in 0..r {
        for i in (0..j).rev() {
            let n = t.nvars();
            let ei = t.lift(&diag[i]);
            let mut c = Vec::with_capacity(md);
            for k in 0..md {
                let a = s.matrix(k).pad_vars(n);
                let mut acc = RatFunc::zero(n);
                for l in (i + 1)..=j {
                    let e = a.get(i, l);
                    if !e.is_zero() {
                        acc = &acc + &(e * &t.lift(&cols[j][l]));
                    }
                }
                c.push(t.div(&acc, &ei));
            }
            let z = if c.iter().all(|x| t.is_zero(x)) {
                RatFunc::zero(n)
            } else if let Some(h) = base_antiderivative(&t, &c) {
                h
            } else {
                let name = t.fresh_name(&format!("I{}{}", i + 1, j + 1));
                t = t.extend(&[&name], StepKind::Integral(c))?;
                t.var(&name).expect("new generator")
            };
            cols[j][i] = t.mul(&t.lift(&ei), &z);
        }
    }
    let n = t.nvars();
    let rows: Vec<Vec<RatFunc>> = (0..r).map(|i| (0..r).map(|j| t.lift(&cols[j][i]).pad_vars(n)).collect()).collect();
    let m = Matrix::from_rows(rows).expect("square matrix");
    Ok((t, m))
}

fn base_antiderivative(t: &Tower, c: &[RatFunc]) -> Option<RatFunc> {
    let nb = t.base_len();
    if t.kolchin_m.is_some() || c.iter().any(|x| (nb..t.nvars()).any(|v| x.depends_on(v))) {
        return None;
    }
    let base: Vec<RatFunc> = c.iter().map(|x| RatFunc::new(truncate(x.num(), nb), truncate(x.den(), nb))).collect();
    match ratfunc::antiderive_poly(&base) {
        Ok(Some(h)) => Some(t.lift(&h)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::LinSystem;

    fn base() -> Tower {
        Tower::new(DiffContext::new(["t1", "t2"], None).unwrap())
    }

    fn t(i: usize) -> RatFunc {
        RatFunc::var(2, i)
    }

    #[test]
    fn exp_tower_derivations() {
        let tw = base().extend(&["E"], StepKind::ExpIntegral(vec![t(1), t(0)])).unwrap();
        let e = tw.var("E").unwrap();
        let e2 = tw.mul(&e, &e);
        let d = tw.derive_elem(&e2, 0);
        let two_t2 = RatFunc::var(3, 1).scale(&QuadScalar::from_int(2));
        assert!(tw.equals(&d, &tw.mul(&two_t2, &e2)));
        let x = tw.mul(&RatFunc::var(3, 0), &e);
        let d = tw.derive_elem(&x, 1);
        let t1 = RatFunc::var(3, 0);
        assert!(tw.equals(&d, &tw.mul(&tw.mul(&t1, &t1), &e)));
    }

    #[test]
    fn rotation_relation_is_consistent() {
        let tw = base().extend(&["s", "c"], StepKind::RotationPair(vec![t(0).scale(&QuadScalar::zero()), RatFunc::one(2)])).unwrap();
        let s = tw.var("s").unwrap();
        let c = tw.var("c").unwrap();
        let x = &(&s * &s) + &(&c * &c);
        assert!(tw.derive_elem(&x, 1).is_zero());
        for rel in tw.relation_polys() {
            for i in 0..2 {
                assert!(tw.derive_elem(&rel, i).is_zero());
            }
        }
        assert!(tw.equals(&x, &RatFunc::one(4)));
    }

    #[test]
    fn integral_flags() {
        let tw = base().extend(&["L"], StepKind::Integral(vec![t(0).inv(), RatFunc::zero(2)])).unwrap();
        assert_eq!(tw.steps()[0].flags().nonderivative, Check::Yes);
        assert_eq!(tw.steps()[0].flags().zero_components, vec![1]);
        assert_eq!(tw.steps()[0].flags().vector_exact, Some(false));
        let err = base().extend(&["L"], StepKind::Integral(vec![&t(1) * &t(1), t(1)])).unwrap_err();
        assert_eq!(err, TowerError::CompatibilityViolation { step: "L".into(), i: 0, j: 1 });
    }

    #[test]
    fn algebraic_square_root() {
        let n = 3;
        let a = RatFunc::var(n, 2);
        let p = &(&a * &a) - &RatFunc::var(n, 0);
        let coeffs = algebraic_coefficients(&p, 2, "a").unwrap();
        let tw = base().extend(&["a"], StepKind::Algebraic(coeffs)).unwrap();
        assert_eq!(tw.steps()[0].flags().irreducibility, Check::Yes);
        let a = tw.var("a").unwrap();
        // d1 a = 1/(2a)
        let d = tw.derive_elem(&a, 0);
        let expect = tw.div(&RatFunc::one(3), &a.scale(&QuadScalar::from_int(2)));
        assert!(tw.equals(&d, &expect));
        for rel in tw.relation_polys() {
            assert!(tw.derive_elem(&rel, 0).is_zero());
        }
        let bad = &(&RatFunc::var(n, 2) * &RatFunc::var(n, 2)) - &(&RatFunc::var(n, 0) * &RatFunc::var(n, 0));
        let coeffs = algebraic_coefficients(&bad, 2, "b").unwrap();
        assert_eq!(base().extend(&["b"], StepKind::Algebraic(coeffs)), Err(TowerError::ReducibleMinimalPolynomial("b".into())));
    }

    #[test]
    fn triangular_examples() {
        let ctx = DiffContext::new(["t1", "t2"], None).unwrap();
        let sc = |f: RatFunc| Matrix::from_rows(vec![vec![f]]).unwrap();
        let s7 = LinSystem::new(ctx.clone(), vec![sc(t(1)), sc(t(0))]).unwrap();
        let (tw, m) = solve_triangular(&s7).unwrap();
        assert_eq!(tw.steps().len(), 1);
        assert!(verify_fundamental(&tw, &s7, &m).ok);

        let z = RatFunc::zero(2);
        let nil = |a: RatFunc| Matrix::from_rows(vec![vec![z.clone(), a], vec![z.clone(), z.clone()]]).unwrap();
        let s = LinSystem::new(ctx.clone(), vec![nil(t(1)), nil(t(0))]).unwrap();
        let (tw, m) = solve_triangular(&s).unwrap();
        assert!(tw.steps().is_empty());
        assert!(m.get(0, 1).equals(&(&t(0) * &t(1))));

        let s = LinSystem::new(ctx, vec![sc(t(0).inv()), sc(z)]).unwrap();
        let (tw, m) = solve_triangular(&s).unwrap();
        assert!(tw.steps().is_empty());
        assert!(m.get(0, 0).equals(&t(0)));
    }

    #[test]
    fn power_subfield() {
        let tw = base().extend(&["E"], StepKind::ExpIntegral(vec![t(1), t(0)])).unwrap();
        let t3 = fixed_subfield_power(&tw, 3).unwrap();
        let c = t3.steps()[0].kind().coefficients();
        assert!(c[0].equals(&t(1).scale(&QuadScalar::from_int(3))));
        assert!(c[1].equals(&t(0).scale(&QuadScalar::from_int(3))));
        assert_eq!(fixed_subfield_power(&tw, 1).unwrap(), tw);
    }

    #[test]
    fn reduction_of_towers() {
        let tw = base().extend(&["L"], StepKind::Integral(vec![t(0).inv(), RatFunc::zero(2)])).unwrap();
        let r = reduce_tower(&tw).unwrap();
        let c = &r.steps()[0].kind().coefficients()[0];
        assert!(c.equals(&(&RatFunc::var(4, 2) / &RatFunc::var(4, 0))));
        assert_eq!(reduce_tower(&base()).unwrap().steps().len(), 0);
    }
}
