//! Rational functions with commuting partial derivations and the iterated
//! infinitesimal ordering.
//!
//! A [`RatFunc`] is kept as `num/den` with three normalizations only: common
//! monomial factors are cancelled, `den` is dropped when it divides `num`
//! exactly, and `den` is scaled so that its dominant term has coefficient 1.
//! There is no multivariate gcd, so equality of values goes through
//! cross-multiplication ([`eq`]) rather than structural comparison.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigUint;

use crate::error::RatFuncError;
use crate::poly::MultiPoly;
use crate::scalar::QuadScalar;
use crate::unipoly::{self, UniPoly};

/// Variable names in ordering-tower order. The first `derivations` names are
/// the differential variables `t_i` with `d_i = d/dt_i`; any further names
/// (Kolchin's `u_k`) are constants for every `d_i` and sit at the bottom of
/// the ordering tower.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiffContext {
    vars: Vec<String>,
    derivations: usize,
    radicand: Option<BigUint>,
}

impl DiffContext {
    pub fn new<S: Into<String>>(vars: impl IntoIterator<Item = S>, radicand: Option<BigUint>) -> Result<Self, RatFuncError> {
        let vars: Vec<String> = vars.into_iter().map(Into::into).collect();
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(RatFuncError::DuplicateVariable(v.clone()));
            }
        }
        let derivations = vars.len();
        Ok(DiffContext { vars, derivations, radicand })
    }

    /// Appends constant (non-differential) variables after the current ones.
    pub fn extend_constants<S: Into<String>>(&self, names: impl IntoIterator<Item = S>) -> Result<Self, RatFuncError> {
        let mut out = self.clone();
        for n in names {
            let n = n.into();
            if out.vars.contains(&n) {
                return Err(RatFuncError::VariableClash(n));
            }
            out.vars.push(n);
        }
        Ok(out)
    }

    /// Same names, with every variable differential.
    pub fn with_all_differential(&self) -> Self {
        DiffContext { derivations: self.vars.len(), ..self.clone() }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn derivation_count(&self) -> usize {
        self.derivations
    }

    pub fn radicand(&self) -> Option<&BigUint> {
        self.radicand.as_ref()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn var(&self, name: &str) -> Option<RatFunc> {
        self.index_of(name).map(|i| RatFunc::var(self.nvars(), i))
    }

    pub fn zero(&self) -> RatFunc {
        RatFunc::zero(self.nvars())
    }

    pub fn one(&self) -> RatFunc {
        RatFunc::one(self.nvars())
    }

    pub fn constant(&self, c: QuadScalar) -> RatFunc {
        RatFunc::constant(self.nvars(), c)
    }

    /// `d_i f`; only the differential variables carry derivations.
    pub fn derive(&self, f: &RatFunc, i: usize) -> RatFunc {
        assert!(i < self.derivations, "derivation index {i} out of range");
        f.partial(i)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: MultiPoly,
    den: MultiPoly,
}

impl RatFunc {
    /// Builds `num/den` and normalizes. Panics when `den` is zero.
    pub fn new(num: MultiPoly, den: MultiPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        assert_eq!(num.nvars(), den.nvars(), "variable count mismatch");
        let mut f = RatFunc { num, den };
        f.normalize();
        f
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        let n = p.nvars();
        RatFunc { num: p, den: MultiPoly::one(n) }
    }

    pub fn zero(n: usize) -> Self {
        Self::from_poly(MultiPoly::zero(n))
    }

    pub fn one(n: usize) -> Self {
        Self::from_poly(MultiPoly::one(n))
    }

    pub fn constant(n: usize, c: QuadScalar) -> Self {
        Self::from_poly(MultiPoly::constant(n, c))
    }

    pub fn from_int(n: usize, v: i64) -> Self {
        Self::constant(n, QuadScalar::from_int(v))
    }

    pub fn var(n: usize, i: usize) -> Self {
        Self::from_poly(MultiPoly::var(n, i))
    }

    pub fn num(&self) -> &MultiPoly {
        &self.num
    }

    pub fn den(&self) -> &MultiPoly {
        &self.den
    }

    pub fn into_parts(self) -> (MultiPoly, MultiPoly) {
        (self.num, self.den)
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn as_constant(&self) -> Option<QuadScalar> {
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        Some(&n / &d)
    }

    /// The numerator when the denominator is one (always the case for a
    /// normalized polynomial).
    pub fn as_poly(&self) -> Option<&MultiPoly> {
        self.den.is_one().then_some(&self.num)
    }

    pub fn depends_on(&self, i: usize) -> bool {
        self.num.depends_on(i) || self.den.depends_on(i)
    }

    fn normalize(&mut self) {
        let n = self.num.nvars();
        if self.num.is_zero() {
            self.den = MultiPoly::one(n);
            return;
        }
        if let Some(c) = self.den.as_constant() {
            self.num = self.num.scale(&c.inv());
            self.den = MultiPoly::one(n);
            return;
        }
        let mut content = self.num.monomial_content();
        for (c, d) in content.iter_mut().zip(self.den.monomial_content()) {
            *c = (*c).min(d);
        }
        if content.iter().any(|&e| e > 0) {
            self.num = self.num.div_monomial(&content);
            self.den = self.den.div_monomial(&content);
        }
        if let Some(q) = self.num.try_div_exact(&self.den) {
            self.num = q;
            self.den = MultiPoly::one(n);
            return;
        }
        if self.num.len() <= self.den.len() {
            if let Some(q) = self.den.try_div_exact(&self.num) {
                self.num = MultiPoly::one(n);
                self.den = q;
            }
        }
        if let Some(c) = self.den.as_constant() {
            self.num = self.num.scale(&c.inv());
            self.den = MultiPoly::one(n);
            return;
        }
        let lead = self.den.dominant().map(|(_, c)| c.clone()).expect("nonzero denominator");
        if !lead.is_one() {
            let inv = lead.inv();
            self.num = self.num.scale(&inv);
            self.den = self.den.scale(&inv);
        }
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, e: i32) -> Self {
        let (n, d) = (self.num.pow(e.unsigned_abs()), self.den.pow(e.unsigned_abs()));
        let f = RatFunc { num: n, den: d };
        if e < 0 {
            f.inv()
        } else {
            Self::new(f.num, f.den)
        }
    }

    pub fn scale(&self, c: &QuadScalar) -> Self {
        Self::new(self.num.scale(c), self.den.clone())
    }

    /// Formal partial derivative by the quotient rule.
    pub fn partial(&self, i: usize) -> Self {
        if self.den.is_one() {
            return Self::from_poly(self.num.partial(i));
        }
        let dn = self.num.partial(i);
        let dd = self.den.partial(i);
        if dd.is_zero() {
            return Self::new(dn, self.den.clone());
        }
        Self::new(&(&dn * &self.den) - &(&self.num * &dd), &self.den * &self.den)
    }

    /// Value equality by cross-multiplication.
    pub fn equals(&self, other: &Self) -> bool {
        if self == other {
            return true;
        }
        (&self.num * &other.den) == (&other.num * &self.den)
    }

    pub fn sign(&self) -> i8 {
        sign_infinitesimal(self)
    }

    pub fn pad_vars(&self, n: usize) -> Self {
        RatFunc { num: self.num.pad_vars(n), den: self.den.pad_vars(n) }
    }

    pub fn remap(&self, map: &[usize], n: usize) -> Self {
        Self::new(self.num.remap(map, n), self.den.remap(map, n))
    }

    pub fn radicand(&self) -> Option<&BigUint> {
        self.num.radicand().or_else(|| self.den.radicand())
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        if self.den == rhs.den {
            return RatFunc::new(&self.num + &rhs.num, self.den.clone());
        }
        if rhs.den.is_one() {
            return RatFunc::new(&self.num + &(&rhs.num * &self.den), self.den.clone());
        }
        if self.den.is_one() {
            return RatFunc::new(&(&self.num * &rhs.den) + &rhs.num, rhs.den.clone());
        }
        RatFunc::new(&(&self.num * &rhs.den) + &(&rhs.num * &self.den), &self.den * &rhs.den)
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero(self.nvars());
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RatFunc::from_poly(&self.num * &rhs.num);
        }
        RatFunc::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Div for &RatFunc {
    type Output = RatFunc;
    fn div(self, rhs: &RatFunc) -> RatFunc {
        assert!(!rhs.is_zero(), "division by zero");
        RatFunc::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for RatFunc {
            type Output = RatFunc;
            fn $m(self, rhs: RatFunc) -> RatFunc { (&self).$m(&rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars()).map(|i| format!("x{i}")).collect();
        write!(f, "{}", crate::sysio::render_ratfunc(self, &names))
    }
}

/// `d_i f` (quotient rule, normalized).
pub fn derive(f: &RatFunc, i: usize) -> RatFunc {
    f.partial(i)
}

/// Whether `f` and `g` denote the same field element.
pub fn eq(f: &RatFunc, g: &RatFunc) -> bool {
    f.equals(g)
}

fn poly_sign(p: &MultiPoly) -> i8 {
    p.dominant().map(|(_, c)| c.sign()).unwrap_or(0)
}

/// Sign under the ordering where each variable is positive and smaller than
/// every positive element of the field generated by the variables before it.
/// A polynomial takes the sign of the coefficient of the lowest power of the
/// last variable, recursively; a quotient takes `sign(num) * sign(den)`.
pub fn sign_infinitesimal(f: &RatFunc) -> i8 {
    poly_sign(f.num()) * poly_sign(f.den())
}

/// Whether `f`, a function of the single variable `var`, is the derivative of
/// a rational function in that variable.
pub fn is_derivative_univariate(f: &RatFunc, var: usize) -> Result<bool, RatFuncError> {
    let name = || format!("#{}", var + 1);
    let num = UniPoly::from_multi(f.num(), var).ok_or_else(|| RatFuncError::NotUnivariate(name()))?;
    let den = UniPoly::from_multi(f.den(), var).ok_or_else(|| RatFuncError::NotUnivariate(name()))?;
    Ok(unipoly::is_derivative(&num, &den))
}

/// Checks `d_i f_j = d_j f_i` for all pairs.
pub fn check_compatible(fs: &[RatFunc]) -> Result<(), RatFuncError> {
    for i in 0..fs.len() {
        for j in (i + 1)..fs.len() {
            if !fs[j].partial(i).equals(&fs[i].partial(j)) {
                return Err(RatFuncError::CompatibilityViolation(i, j));
            }
        }
    }
    Ok(())
}

/// A polynomial `h` with `d_k h = f_k` for every `k`, when the `f_k` are
/// polynomials. Incompatible input is an error; non-polynomial input yields
/// `None`.
pub fn antiderive_poly(fs: &[RatFunc]) -> Result<Option<RatFunc>, RatFuncError> {
    check_compatible(fs)?;
    let Some(first) = fs.first() else {
        return Ok(None);
    };
    let n = first.nvars();
    let mut polys = Vec::with_capacity(fs.len());
    for f in fs {
        match f.as_poly() {
            Some(p) => polys.push(p.clone()),
            None => return Ok(None),
        }
    }
    let mut h = MultiPoly::zero(n);
    for (k, fk) in polys.iter().enumerate() {
        let rest = fk - &h.partial(k);
        h = &h + &rest.integrate(k);
    }
    let ok = polys.iter().enumerate().all(|(k, fk)| &h.partial(k) == fk);
    Ok(ok.then(|| RatFunc::from_poly(h)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> DiffContext {
        DiffContext::new(["t1", "t2"], None).unwrap()
    }

    fn t(i: usize) -> RatFunc {
        RatFunc::var(2, i)
    }

    fn k(v: i64) -> RatFunc {
        RatFunc::from_int(2, v)
    }

    #[test]
    fn derive_examples() {
        let c = ctx();
        assert!(c.derive(&(&t(0) * &t(1)), 0).equals(&t(1)));
        assert!(c.derive(&t(0).inv(), 0).equals(&(-&(&t(0) * &t(0)).inv())));
        let f = &(&t(0) + &t(1)) / &(&t(0) - &t(1));
        let diff = &t(0) - &t(1);
        let expect = &(&k(2) * &t(0)) / &(&diff * &diff);
        assert!(c.derive(&f, 1).equals(&expect));
    }

    #[test]
    fn equality_examples() {
        let a = &(&(&t(0) * &t(0)) - &(&t(1) * &t(1))) / &(&t(0) - &t(1));
        assert!(eq(&a, &(&t(0) + &t(1))));
        assert!(!eq(&(&t(0) / &t(1)), &(&t(1) / &t(0))));
        assert!(eq(&(&(&k(2) * &t(0)) / &(&k(2) * &t(1))), &(&t(0) / &t(1))));
    }

    #[test]
    fn sign_examples() {
        assert_eq!(sign_infinitesimal(&t(0)), 1);
        assert_eq!(sign_infinitesimal(&(&k(1) - &t(0))), 1);
        assert_eq!(sign_infinitesimal(&(&t(0) - &t(1))), 1);
        assert_eq!(sign_infinitesimal(&(&t(1) - &t(0))), -1);
        assert_eq!(sign_infinitesimal(&k(0)), 0);
        assert_eq!(sign_infinitesimal(&(&k(-3) / &t(1))), -1);
    }

    #[test]
    fn derivative_test_examples() {
        let one = k(1);
        assert!(is_derivative_univariate(&(&one / &(&t(0) * &t(0))), 0).unwrap());
        assert!(!is_derivative_univariate(&(&one / &t(0)), 0).unwrap());
        let t3 = &(&t(0) * &t(0)) * &t(0);
        let f = &(&(&k(3) * &(&t(0) * &t(0))) + &one) / &(&t3 + &t(0));
        assert!(!is_derivative_univariate(&f, 0).unwrap());
        assert!(is_derivative_univariate(&k(0), 0).unwrap());
        assert!(matches!(is_derivative_univariate(&(&t(0) * &t(1)), 0), Err(RatFuncError::NotUnivariate(_))));
    }

    #[test]
    fn antiderive_examples() {
        let h = antiderive_poly(&[t(1), t(0)]).unwrap().unwrap();
        assert!(h.equals(&(&t(0) * &t(1))));
        let h = antiderive_poly(&[&k(2) * &t(0), k(0)]).unwrap().unwrap();
        assert!(h.equals(&(&t(0) * &t(0))));
        assert_eq!(
            antiderive_poly(&[&t(1) * &t(1), t(1)]),
            Err(RatFuncError::CompatibilityViolation(0, 1))
        );
        assert_eq!(antiderive_poly(&[t(0).inv(), k(0)]).unwrap(), None);
    }

    #[test]
    fn normal_form_has_positive_denominator() {
        let f = &t(0) / &(&k(-2) * &t(1));
        assert_eq!(sign_infinitesimal(&RatFunc::from_poly(f.den().clone())), 1);
        assert!(f.den().dominant().unwrap().1.is_one());
    }

    #[test]
    fn context_rules() {
        assert!(DiffContext::new(["a", "a"], None).is_err());
        let c = ctx().extend_constants(["u1", "u2"]).unwrap();
        assert_eq!(c.derivation_count(), 2);
        assert_eq!(c.nvars(), 4);
        assert!(matches!(c.extend_constants(["t1"]), Err(RatFuncError::VariableClash(_))));
    }
}
