//! Dense univariate polynomials over [`QuadScalar`] and Hermite reduction.

use crate::poly::MultiPoly;
use crate::scalar::{QuadScalar, Rat};

/// Coefficients from degree 0 upward, with no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<QuadScalar>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<QuadScalar>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: QuadScalar) -> Self {
        Self::new(vec![c])
    }

    pub fn x() -> Self {
        Self::new(vec![QuadScalar::zero(), QuadScalar::one()])
    }

    pub fn coeffs(&self) -> &[QuadScalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `-1` for the zero polynomial.
    pub fn deg(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn lc(&self) -> QuadScalar {
        self.coeffs.last().cloned().unwrap_or_else(QuadScalar::zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = QuadScalar::zero();
        Self::new((0..n).map(|i| self.coeffs.get(i).unwrap_or(&z) + o.coeffs.get(i).unwrap_or(&z)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        UniPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![QuadScalar::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &QuadScalar) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.scale(&Rat::from_integer((i as i64).into())))
                .collect(),
        )
    }

    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut rem = self.coeffs.clone();
        let dn = d.coeffs.len();
        if rem.len() < dn {
            return (Self::zero(), self.clone());
        }
        let inv = d.lc().inv();
        let mut quo = vec![QuadScalar::zero(); rem.len() - dn + 1];
        for k in (0..quo.len()).rev() {
            let q = &rem[k + dn - 1] * &inv;
            if q.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[k + j] = &rem[k + j] - &(&q * dc);
            }
            quo[k] = q;
        }
        rem.truncate(dn - 1);
        (Self::new(quo), Self::new(rem))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    /// Quotient of an exact division; panics on a nonzero remainder.
    pub fn div_exact(&self, d: &Self) -> Self {
        let (q, r) = self.divrem(d);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(&self.lc().inv())
    }

    /// Monic gcd.
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `s*a + t*b = g` and `g` the monic gcd.
    pub fn ext_gcd(a: &Self, b: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (Self::constant(QuadScalar::one()), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::constant(QuadScalar::one()));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s2 = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s2);
            let t2 = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t2);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = r0.lc().inv();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    /// Solves `s*a + t*b = c` with `deg s < deg b`, assuming `gcd(a, b) | c`.
    pub fn solve_bezout(a: &Self, b: &Self, c: &Self) -> Option<(Self, Self)> {
        let (g, s, t) = Self::ext_gcd(a, b);
        let (q, r) = c.divrem(&g);
        if !r.is_zero() {
            return None;
        }
        let (mut s, mut t) = (s.mul(&q), t.mul(&q));
        if !b.is_zero() && s.deg() >= b.deg() {
            let (qq, rr) = s.divrem(b);
            s = rr;
            t = t.add(&qq.mul(a));
        }
        Some((s, t))
    }

    /// Reads a polynomial in one variable of a multivariate ring; `None` when
    /// another variable occurs.
    pub fn from_multi(p: &MultiPoly, var: usize) -> Option<Self> {
        let mut coeffs = vec![QuadScalar::zero(); p.degree_in(var) as usize + 1];
        for (e, c) in p.terms() {
            if e.iter().enumerate().any(|(i, &x)| i != var && x != 0) {
                return None;
            }
            coeffs[e[var] as usize] = c.clone();
        }
        Some(Self::new(coeffs))
    }
}

/// Result of Hermite reduction of `A/D`: `A/D = g' + num/den` with `den`
/// squarefree. `g` is returned as a numerator/denominator pair.
#[derive(Clone, Debug)]
pub struct HermiteSplit {
    pub g_num: UniPoly,
    pub g_den: UniPoly,
    pub rem_num: UniPoly,
    pub rem_den: UniPoly,
}

/// Mack's linear variant of Hermite reduction.
pub fn hermite_reduce(a: &UniPoly, d: &UniPoly) -> HermiteSplit {
    let mut a = a.clone();
    let mut g_num = UniPoly::zero();
    let mut g_den = UniPoly::constant(QuadScalar::one());
    let mut d_minus = d.gcd(&d.derivative());
    let d_star = d.div_exact(&d_minus);
    while d_minus.deg() > 0 {
        let d_minus2 = d_minus.gcd(&d_minus.derivative());
        let d_minus_star = d_minus.div_exact(&d_minus2);
        let lhs = d_star.mul(&d_minus.derivative()).div_exact(&d_minus).neg();
        let (b, c) = UniPoly::solve_bezout(&lhs, &d_minus_star, &a).expect("coprime Hermite factors");
        a = c.sub(&b.derivative().mul(&d_star.div_exact(&d_minus_star)));
        // g += b / d_minus
        g_num = g_num.mul(&d_minus).add(&b.mul(&g_den));
        g_den = g_den.mul(&d_minus);
        d_minus = d_minus2;
    }
    HermiteSplit { g_num, g_den, rem_num: a, rem_den: d_star }
}

/// Whether `num/den` is the derivative of a univariate rational function.
pub fn is_derivative(num: &UniPoly, den: &UniPoly) -> bool {
    if num.is_zero() {
        return true;
    }
    let split = hermite_reduce(num, den);
    // the polynomial part of the remainder always integrates
    split.rem_num.rem(&split.rem_den).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(cs: &[i64]) -> UniPoly {
        UniPoly::new(cs.iter().map(|&c| QuadScalar::from_int(c)).collect())
    }

    #[test]
    fn gcd_and_bezout() {
        // (x-1)(x+2) and (x-1)(x+3)
        let a = p(&[-2, 1, 1]);
        let b = p(&[-3, 2, 1]);
        assert_eq!(a.gcd(&b), p(&[-1, 1]));
        let (g, s, t) = UniPoly::ext_gcd(&a, &b);
        assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
    }

    #[test]
    fn hermite_examples() {
        // 1/x^2 = (-1/x)'
        assert!(is_derivative(&p(&[1]), &p(&[0, 0, 1])));
        // 1/x has a residue
        assert!(!is_derivative(&p(&[1]), &p(&[0, 1])));
        // (3x^2+1)/(x^3+x) is a logarithmic derivative
        assert!(!is_derivative(&p(&[1, 0, 3]), &p(&[0, 1, 0, 1])));
        // polynomials always integrate
        assert!(is_derivative(&p(&[4, 0, 1]), &p(&[1])));
    }

    #[test]
    fn hermite_splits_back() {
        // A/D with D = x^3 (x+1)^2
        let d = p(&[0, 0, 0, 1]).mul(&p(&[1, 1]).mul(&p(&[1, 1])));
        let a = p(&[5, -1, 2]);
        let s = hermite_reduce(&a, &d);
        // g' + rem == a/d  <=>  (g_num' g_den - g_num g_den') rem_den + rem_num g_den^2 == a/d * g_den^2 rem_den
        let gd = &s.g_den;
        let lhs_num = s
            .g_num
            .derivative()
            .mul(gd)
            .sub(&s.g_num.mul(&gd.derivative()))
            .mul(&s.rem_den)
            .add(&s.rem_num.mul(&gd.mul(gd)));
        let lhs_den = gd.mul(gd).mul(&s.rem_den);
        assert_eq!(lhs_num.mul(&d), a.mul(&lhs_den));
        assert_eq!(s.rem_den.gcd(&s.rem_den.derivative()).deg(), 0);
    }
}
