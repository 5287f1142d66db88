//! Exact constants: arbitrary-precision rationals and real quadratic fields
//! `Q(sqrt d)`, ordered by the embedding with `sqrt d > 0`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::ScalarError;

/// Exact rational number; always reduced with a positive denominator.
pub type Rat = BigRational;

/// Builds `p/q` from machine integers. Panics when `q == 0`.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_int(p: i64) -> Rat {
    Rat::from_integer(BigInt::from(p))
}

/// `a + b*sqrt(d)`. When `b == 0` the radicand tag is dropped, so a value
/// carries `Some(d)` exactly when it is irrational.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadScalar {
    a: Rat,
    b: Rat,
    d: Option<BigUint>,
}

/// Writes `n = s^2 * d` with `d` square-free. Trial division is complete up to
/// `10^6`; a remaining cofactor is tested for being a perfect square.
pub fn squarefree_decompose(n: &BigUint) -> (BigUint, BigUint) {
    if n.is_zero() {
        return (BigUint::zero(), BigUint::one());
    }
    let mut rest = n.clone();
    let mut square = BigUint::one();
    let mut free = BigUint::one();
    let mut p = 2u64;
    while p <= 1_000_000 {
        let pb = BigUint::from(p);
        if &pb * &pb > rest {
            break;
        }
        let mut e = 0u32;
        while (&rest % &pb).is_zero() {
            rest /= &pb;
            e += 1;
        }
        if e > 0 {
            square *= pb.pow(e / 2);
            if e % 2 == 1 {
                free *= &pb;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > BigUint::one() {
        let r = rest.sqrt();
        if &r * &r == rest {
            square *= r;
        } else {
            free *= rest;
        }
    }
    (square, free)
}

impl QuadScalar {
    pub fn zero() -> Self {
        Self::from_rat(Rat::zero())
    }

    pub fn one() -> Self {
        Self::from_rat(Rat::one())
    }

    pub fn from_rat(a: Rat) -> Self {
        QuadScalar { a, b: Rat::zero(), d: None }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rat(rat_int(n))
    }

    /// `a + b*sqrt(d)`; `d` must be square-free and greater than one.
    pub fn new(a: Rat, b: Rat, d: BigUint) -> Result<Self, ScalarError> {
        if d <= BigUint::one() || squarefree_decompose(&d).0 != BigUint::one() {
            return Err(ScalarError::NotSquareFree(d.to_string()));
        }
        Ok(Self::raw(a, b, Some(d)))
    }

    fn raw(a: Rat, b: Rat, d: Option<BigUint>) -> Self {
        if b.is_zero() || d.is_none() {
            QuadScalar { a, b: Rat::zero(), d: None }
        } else {
            QuadScalar { a, b, d }
        }
    }

    /// `sqrt(n)` for a non-negative integer, reduced to `s*sqrt(d)`.
    pub fn sqrt_int(n: &BigUint) -> Self {
        let (s, d) = squarefree_decompose(n);
        let s = Rat::from_integer(BigInt::from(s));
        if d.is_one() {
            Self::from_rat(s)
        } else {
            Self::raw(Rat::zero(), s, Some(d))
        }
    }

    /// Square root of a non-negative rational: `sqrt(p/q) = sqrt(p*q)/q`.
    pub fn sqrt_rat(r: &Rat) -> Option<Self> {
        if r.is_negative() {
            return None;
        }
        let pq = (r.numer() * r.denom()).to_biguint()?;
        let root = Self::sqrt_int(&pq);
        Some(root.scale(&Rat::new(BigInt::one(), r.denom().clone())))
    }

    pub fn rational_part(&self) -> &Rat {
        &self.a
    }

    pub fn radical_part(&self) -> &Rat {
        &self.b
    }

    pub fn radicand(&self) -> Option<&BigUint> {
        self.d.as_ref()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.b.is_zero() && self.a.is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.d.is_none()
    }

    pub fn to_rat(&self) -> Option<&Rat> {
        if self.is_rational() {
            Some(&self.a)
        } else {
            None
        }
    }

    pub fn scale(&self, r: &Rat) -> Self {
        Self::raw(&self.a * r, &self.b * r, self.d.clone())
    }

    fn shared_tag(&self, other: &Self) -> Result<Option<BigUint>, ScalarError> {
        match (&self.d, &other.d) {
            (Some(x), Some(y)) if x != y => Err(ScalarError::MixedRadicand(x.to_string(), y.to_string())),
            (Some(x), _) | (None, Some(x)) => Ok(Some(x.clone())),
            (None, None) => Ok(None),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, ScalarError> {
        let d = self.shared_tag(other)?;
        Ok(Self::raw(&self.a + &other.a, &self.b + &other.b, d))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, ScalarError> {
        let d = self.shared_tag(other)?;
        Ok(Self::raw(&self.a - &other.a, &self.b - &other.b, d))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, ScalarError> {
        let d = self.shared_tag(other)?;
        let a = match &d {
            Some(dv) => {
                let dr = Rat::from_integer(BigInt::from(dv.clone()));
                &self.a * &other.a + &self.b * &other.b * dr
            }
            None => &self.a * &other.a,
        };
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(Self::raw(a, b, d))
    }

    /// Field norm `a^2 - b^2 d`, nonzero for nonzero input.
    pub fn norm(&self) -> Rat {
        match &self.d {
            Some(d) => &self.a * &self.a - &self.b * &self.b * Rat::from_integer(BigInt::from(d.clone())),
            None => &self.a * &self.a,
        }
    }

    pub fn try_inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if self.d.is_none() {
            return Ok(Self::from_rat(self.a.recip()));
        }
        let n = self.norm();
        Ok(Self::raw(&self.a / &n, -(&self.b / &n), self.d.clone()))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, ScalarError> {
        self.try_mul(&other.try_inv()?)
    }

    pub fn inv(&self) -> Self {
        self.try_inv().expect("inverse of zero scalar")
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn sign(&self) -> i8 {
        quad_sign(self)
    }

    pub fn abs(&self) -> Self {
        if self.sign() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// Exact comparison; fails only on mixed radicands.
    pub fn try_cmp(&self, other: &Self) -> Result<Ordering, ScalarError> {
        Ok(match self.try_sub(other)?.sign() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        })
    }

    /// Rough magnitude for diagnostics only.
    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        match &self.d {
            Some(d) => a + self.b.to_f64().unwrap_or(f64::NAN) * d.to_f64().unwrap_or(f64::NAN).sqrt(),
            None => a,
        }
    }
}

fn rat_sign(r: &Rat) -> i8 {
    match r.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Sign of `a + b*sqrt(d)` under the real embedding with `sqrt d > 0`.
pub fn quad_sign(x: &QuadScalar) -> i8 {
    let sa = rat_sign(&x.a);
    let sb = rat_sign(&x.b);
    if sb == 0 {
        return sa;
    }
    if sa == 0 || sa == sb {
        return sb;
    }
    let d = Rat::from_integer(BigInt::from(x.d.clone().expect("irrational part without radicand")));
    let a2 = &x.a * &x.a;
    let b2d = &x.b * &x.b * d;
    // a^2 == b^2 d is impossible for square-free d > 1 and b != 0
    if a2 > b2d {
        sa
    } else {
        sb
    }
}

/// Roots of the indicial equation `r(r-1) = c`, i.e. `(1 +- sqrt(1+4c))/2`,
/// larger root first.
pub fn indicial_roots(c: &Rat) -> Result<(QuadScalar, QuadScalar), ScalarError> {
    let disc = Rat::one() + rat_int(4) * c;
    let root = QuadScalar::sqrt_rat(&disc).ok_or_else(|| ScalarError::NegativeDiscriminant(disc.to_string()))?;
    let half = rat(1, 2);
    let one = QuadScalar::one();
    Ok(((&one + &root).scale(&half), (&one - &root).scale(&half)))
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<'a> $tr<&'a QuadScalar> for &'a QuadScalar {
            type Output = QuadScalar;
            fn $method(self, rhs: &'a QuadScalar) -> QuadScalar {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<QuadScalar> for QuadScalar {
            type Output = QuadScalar;
            fn $method(self, rhs: QuadScalar) -> QuadScalar {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);
forward_binop!(Div, div, try_div);

impl Neg for &QuadScalar {
    type Output = QuadScalar;
    fn neg(self) -> QuadScalar {
        QuadScalar::raw(-&self.a, -&self.b, self.d.clone())
    }
}

impl Neg for QuadScalar {
    type Output = QuadScalar;
    fn neg(self) -> QuadScalar {
        -&self
    }
}

impl From<Rat> for QuadScalar {
    fn from(r: Rat) -> Self {
        QuadScalar::from_rat(r)
    }
}

impl From<i64> for QuadScalar {
    fn from(n: i64) -> Self {
        QuadScalar::from_int(n)
    }
}

/// Renders in the expression grammar: `3/2`, `sqrt(5)`, `(1+sqrt(5))/2`.
impl fmt::Display for QuadScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = match &self.d {
            None => return write!(f, "{}", self.a),
            Some(d) => d,
        };
        let l = self.a.denom().lcm(self.b.denom());
        let lr = Rat::from_integer(l.clone());
        let num_a = (&self.a * &lr).to_integer();
        let num_b = (&self.b * &lr).to_integer();
        let mut body = String::new();
        if !num_a.is_zero() {
            body.push_str(&num_a.to_string());
            body.push(if num_b.is_negative() { '-' } else { '+' });
        } else if num_b.is_negative() {
            body.push('-');
        }
        let mag = num_b.abs();
        if !mag.is_one() {
            body.push_str(&mag.to_string());
            body.push('*');
        }
        body.push_str(&format!("sqrt({d})"));
        let compound = !num_a.is_zero();
        if l.is_one() {
            write!(f, "{body}")
        } else if compound || num_b.is_negative() {
            write!(f, "({body})/{l}")
        } else {
            write!(f, "{body}/{l}")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: Rat, b: Rat, d: u32) -> QuadScalar {
        QuadScalar::new(a, b, BigUint::from(d)).unwrap()
    }

    #[test]
    fn sign_examples() {
        assert_eq!(quad_sign(&QuadScalar::zero()), 0);
        assert_eq!(quad_sign(&q(rat_int(3), rat_int(-1), 5)), 1);
        assert_eq!(quad_sign(&q(rat_int(-1), rat_int(1), 2)), 1);
        assert_eq!(quad_sign(&q(rat_int(1), rat_int(-1), 2)), -1);
        assert_eq!(quad_sign(&q(rat_int(-3), rat_int(1), 5)), -1);
    }

    #[test]
    fn indicial_examples() {
        let (r1, r2) = indicial_roots(&rat_int(1)).unwrap();
        let five = BigUint::from(5u32);
        assert_eq!(r1, q(rat(1, 2), rat(1, 2), 5));
        assert_eq!(r2, q(rat(1, 2), rat(-1, 2), 5));
        assert_eq!(r1.radicand(), Some(&five));
        assert_eq!(r1.to_string(), "(1+sqrt(5))/2");
        assert_eq!(r2.to_string(), "(1-sqrt(5))/2");

        let (r1, r2) = indicial_roots(&rat_int(0)).unwrap();
        assert_eq!((r1, r2), (QuadScalar::one(), QuadScalar::zero()));

        let (r1, r2) = indicial_roots(&rat_int(6)).unwrap();
        assert_eq!((r1, r2), (QuadScalar::from_int(3), QuadScalar::from_int(-2)));

        assert!(matches!(indicial_roots(&rat(-1, 2)), Err(ScalarError::NegativeDiscriminant(_))));
    }

    #[test]
    fn rational_discriminant_numerator_denominator() {
        // 1 + 4*(1/8) = 3/2 -> sqrt(3/2) = sqrt(6)/2
        let (r1, _) = indicial_roots(&rat(1, 8)).unwrap();
        assert_eq!(r1.radicand(), Some(&BigUint::from(6u32)));
        assert_eq!(r1, q(rat(1, 2), rat(1, 4), 6));
    }

    #[test]
    fn squarefree_parts() {
        let (s, d) = squarefree_decompose(&BigUint::from(72u32));
        assert_eq!((s, d), (BigUint::from(6u32), BigUint::from(2u32)));
        let (s, d) = squarefree_decompose(&BigUint::from(1u32));
        assert_eq!((s, d), (BigUint::one(), BigUint::one()));
        let big = BigUint::from(1_000_003u64) * BigUint::from(1_000_003u64) * BigUint::from(7u32);
        assert_eq!(squarefree_decompose(&big), (BigUint::from(1_000_003u64), BigUint::from(7u32)));
    }

    #[test]
    fn mixed_radicands_rejected() {
        let x = QuadScalar::sqrt_int(&BigUint::from(2u32));
        let y = QuadScalar::sqrt_int(&BigUint::from(3u32));
        assert!(matches!(x.try_add(&y), Err(ScalarError::MixedRadicand(..))));
        assert!(x.try_add(&QuadScalar::one()).is_ok());
        assert!(QuadScalar::new(rat_int(1), rat_int(1), BigUint::from(8u32)).is_err());
    }

    #[test]
    fn inverse_and_display() {
        let x = q(rat_int(1), rat_int(1), 2);
        assert!((&x * &x.inv()).is_one());
        assert_eq!(QuadScalar::from_rat(rat(-3, 4)).to_string(), "-3/4");
        assert_eq!(QuadScalar::sqrt_int(&BigUint::from(5u32)).to_string(), "sqrt(5)");
        assert_eq!(q(rat_int(0), rat(-1, 3), 5).to_string(), "(-sqrt(5))/3");
        assert_eq!(q(rat_int(2), rat_int(-3), 7).to_string(), "2-3*sqrt(7)");
    }
}
