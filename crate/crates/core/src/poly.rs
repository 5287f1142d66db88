//! Sparse multivariate polynomials over [`QuadScalar`].
//!
//! Terms live in a `BTreeMap` keyed by exponent vectors, so iteration order is
//! lexicographic with the first variable most significant. That order doubles
//! as the term order for exact division.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::scalar::{QuadScalar, Rat};

pub type Exponents = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Exponents, QuadScalar>,
}

/// Compares exponent vectors starting from the last variable. The minimum
/// under this order is the term that decides the sign of a polynomial when
/// later variables are infinitesimal over earlier ones.
pub fn cmp_revlex(a: &[u32], b: &[u32]) -> Ordering {
    for (x, y) in a.iter().rev().zip(b.iter().rev()) {
        match x.cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

fn divides(small: &[u32], big: &[u32]) -> bool {
    small.iter().zip(big).all(|(s, b)| s <= b)
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, QuadScalar::one())
    }

    pub fn constant(nvars: usize, c: QuadScalar) -> Self {
        Self::monomial(nvars, vec![0; nvars], c)
    }

    pub fn monomial(nvars: usize, exps: Exponents, c: QuadScalar) -> Self {
        assert_eq!(exps.len(), nvars, "exponent vector length");
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(nvars, e, QuadScalar::one())
    }

    /// Builds from raw terms, summing duplicates and dropping zeros.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponents, QuadScalar)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Exponents, c: QuadScalar) {
        debug_assert_eq!(e.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(old) => {
                let s = &*old + &c;
                if s.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponents, &QuadScalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if the polynomial has degree zero.
    pub fn as_constant(&self) -> Option<QuadScalar> {
        match self.terms.len() {
            0 => Some(QuadScalar::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn coeff(&self, e: &[u32]) -> QuadScalar {
        self.terms.get(e).cloned().unwrap_or_else(QuadScalar::zero)
    }

    /// Leading term in lex order.
    pub fn leading(&self) -> Option<(&Exponents, &QuadScalar)> {
        self.terms.iter().next_back()
    }

    /// Term with the smallest exponent vector under [`cmp_revlex`].
    pub fn dominant(&self) -> Option<(&Exponents, &QuadScalar)> {
        self.terms.iter().min_by(|a, b| cmp_revlex(a.0, b.0))
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    pub fn depends_on(&self, i: usize) -> bool {
        self.terms.keys().any(|e| e[i] > 0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &QuadScalar) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MultiPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect() }
    }

    pub fn scale_rat(&self, r: &Rat) -> Self {
        self.scale(&QuadScalar::from_rat(r.clone()))
    }

    pub fn mul_monomial(&self, m: &[u32], c: &QuadScalar) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, x)| (e.iter().zip(m).map(|(a, b)| a + b).collect(), x * c))
            .collect();
        MultiPoly { nvars: self.nvars, terms }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Formal partial derivative with respect to variable `i`.
    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.add_term(e2, c.scale(&Rat::from_integer(e[i].into())));
        }
        out
    }

    /// Term-wise antiderivative in variable `i`.
    pub fn integrate(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            e2[i] += 1;
            out.add_term(e2, c.scale(&Rat::new(1.into(), (e[i] + 1).into())));
        }
        out
    }

    /// Componentwise minimum of all exponent vectors.
    pub fn monomial_content(&self) -> Exponents {
        let mut it = self.terms.keys();
        let mut m = match it.next() {
            Some(e) => e.clone(),
            None => return vec![0; self.nvars],
        };
        for e in it {
            for (a, b) in m.iter_mut().zip(e) {
                *a = (*a).min(*b);
            }
        }
        m
    }

    pub fn div_monomial(&self, m: &[u32]) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.iter().zip(m).map(|(a, b)| a - b).collect(), c.clone()))
            .collect();
        MultiPoly { nvars: self.nvars, terms }
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn try_div_exact(&self, d: &MultiPoly) -> Option<MultiPoly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        let (dm, dc) = d.leading().map(|(e, c)| (e.clone(), c.clone()))?;
        let dc_inv = dc.inv();
        let mut rem = self.clone();
        let mut quo = Self::zero(self.nvars);
        while let Some((lm, lc)) = rem.leading() {
            if !divides(&dm, lm) {
                return None;
            }
            let m: Exponents = lm.iter().zip(&dm).map(|(a, b)| a - b).collect();
            let c = lc * &dc_inv;
            rem = &rem - &d.mul_monomial(&m, &c);
            quo.add_term(m, c);
        }
        Some(quo)
    }

    /// Square root when `self` is the square of a polynomial with leading
    /// coefficient one.
    pub fn sqrt_exact(&self) -> Option<MultiPoly> {
        if self.is_zero() {
            return Some(self.clone());
        }
        let (lm, lc) = self.leading()?;
        if !lc.is_one() || lm.iter().any(|e| e % 2 == 1) {
            return None;
        }
        let half: Exponents = lm.iter().map(|e| e / 2).collect();
        let mut root = Self::monomial(self.nvars, half.clone(), QuadScalar::one());
        let two_inv = QuadScalar::from_rat(Rat::new(1.into(), 2.into()));
        let bound = self.terms.len() * 4 + 8;
        for _ in 0..bound {
            let rem = self - &(&root * &root);
            let (rm, rc) = match rem.leading() {
                None => return Some(root),
                Some((e, c)) => (e.clone(), c.clone()),
            };
            if !divides(&half, &rm) {
                return None;
            }
            let m: Exponents = rm.iter().zip(&half).map(|(a, b)| a - b).collect();
            if m >= half {
                return None;
            }
            root.add_term(m, &rc * &two_inv);
        }
        None
    }

    /// Appends zero exponents so the polynomial lives in `n >= nvars` variables.
    pub fn pad_vars(&self, n: usize) -> Self {
        assert!(n >= self.nvars);
        if n == self.nvars {
            return self.clone();
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut e2 = e.clone();
                e2.resize(n, 0);
                (e2, c.clone())
            })
            .collect();
        MultiPoly { nvars: n, terms }
    }

    /// Moves variable `i` to position `map[i]` in a ring of `n` variables.
    pub fn remap(&self, map: &[usize], n: usize) -> Self {
        assert_eq!(map.len(), self.nvars);
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut e2 = vec![0; n];
                for (i, &x) in e.iter().enumerate() {
                    e2[map[i]] += x;
                }
                (e2, c.clone())
            })
            .collect();
        MultiPoly { nvars: n, terms }
    }

    /// Coefficients of the powers of variable `i`.
    pub fn split_by_var(&self, i: usize) -> BTreeMap<u32, MultiPoly> {
        let mut out: BTreeMap<u32, MultiPoly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let k = std::mem::replace(&mut e2[i], 0);
            out.entry(k).or_insert_with(|| Self::zero(self.nvars)).add_term(e2, c.clone());
        }
        out
    }

    /// Substitutes `var -> value` (a polynomial free of `var`).
    pub fn substitute(&self, var: usize, value: &MultiPoly) -> MultiPoly {
        let mut out = Self::zero(self.nvars);
        for (k, coeff) in self.split_by_var(var) {
            out = &out + &(&coeff * &value.pow(k));
        }
        out
    }

    /// The radicand shared by all coefficients, if any is irrational.
    pub fn radicand(&self) -> Option<&num_bigint::BigUint> {
        self.terms.values().find_map(|c| c.radicand())
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let (big, small) = if self.terms.len() >= rhs.terms.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        for (e, c) in &small.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = MultiPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for MultiPoly {
            type Output = MultiPoly;
            fn $m(self, rhs: MultiPoly) -> MultiPoly { (&self).$m(&rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

impl Zero for MultiPoly {
    fn zero() -> Self {
        MultiPoly::zero(0)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for MultiPoly {
    fn one() -> Self {
        MultiPoly::one(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(n: usize, i: usize) -> MultiPoly {
        MultiPoly::var(n, i)
    }

    fn c(n: usize, v: i64) -> MultiPoly {
        MultiPoly::constant(n, QuadScalar::from_int(v))
    }

    #[test]
    fn exact_division() {
        let a = &x(2, 0) - &x(2, 1);
        let b = &x(2, 0) + &x(2, 1);
        let p = &a * &b;
        assert_eq!(p.try_div_exact(&a), Some(b.clone()));
        assert_eq!(p.try_div_exact(&b), Some(a.clone()));
        assert_eq!(p.try_div_exact(&x(2, 0)), None);
        assert_eq!((&p + &c(2, 1)).try_div_exact(&a), None);
    }

    #[test]
    fn square_roots() {
        let a = &(&x(2, 0) * &x(2, 0)) + &(&c(2, 3) * &x(2, 1));
        let sq = &a * &a;
        assert_eq!(sq.sqrt_exact(), Some(a.clone()));
        assert_eq!((&sq + &x(2, 1)).sqrt_exact(), None);
        assert_eq!(x(2, 0).sqrt_exact(), None);
    }

    #[test]
    fn dominant_term_uses_last_variable_first() {
        // t1 - t2: the t2^0 part is t1
        let p = &x(2, 0) - &x(2, 1);
        assert_eq!(p.dominant().unwrap().0, &vec![1, 0]);
        let q = &c(2, 1) - &x(2, 0);
        assert_eq!(q.dominant().unwrap().0, &vec![0, 0]);
    }

    #[test]
    fn partial_and_integrate() {
        let p = &(&x(2, 0) * &x(2, 0)) * &x(2, 1);
        assert_eq!(p.partial(0), &c(2, 2) * &(&x(2, 0) * &x(2, 1)));
        assert_eq!(p.partial(0).integrate(0), p);
        assert!(p.partial(1).partial(1).is_zero());
    }

    #[test]
    fn substitute_and_remap() {
        let p = &(&x(2, 0) * &x(2, 0)) + &x(2, 1);
        let s = p.substitute(0, &(&x(2, 1) + &c(2, 1)));
        let expect = &(&(&x(2, 1) * &x(2, 1)) + &(&c(2, 3) * &x(2, 1))) + &c(2, 1);
        assert_eq!(s, expect);
        let r = x(2, 1).remap(&[0, 2], 3);
        assert_eq!(r, x(3, 2));
    }
}
