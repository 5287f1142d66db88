//! Gradient flows of `f = lambda x^2 + mu y^2` and their first integral
//! `x^mu / y^lambda`.

use std::fmt;

use num_integer::Integer;

use crate::error::GradientError;
use crate::matrix::Matrix;
use crate::poly::MultiPoly;
use crate::ratfunc::{DiffContext, RatFunc};
use crate::scalar::{QuadScalar, Rat};
use crate::sysio::render_poly;
use crate::system::LinSystem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GradientPotential {
    lambda: i64,
    mu: i64,
}

impl GradientPotential {
    pub fn new(lambda: i64, mu: i64) -> Result<Self, GradientError> {
        if lambda == 0 || mu == 0 {
            return Err(GradientError::ZeroCoefficient);
        }
        Ok(GradientPotential { lambda, mu })
    }

    pub fn lambda(&self) -> i64 {
        self.lambda
    }

    pub fn mu(&self) -> i64 {
        self.mu
    }
}

/// The plane with coordinates `x, y`.
pub fn plane() -> DiffContext {
    DiffContext::new(["x", "y"], None).expect("distinct names")
}

/// `dX/dt = diag(2 lambda, 2 mu) X` over the constants, with time `t`.
pub fn gradient_system(p: &GradientPotential) -> LinSystem {
    let ctx = DiffContext::new(["t"], None).expect("one name");
    let a = Matrix::diagonal(vec![RatFunc::from_int(1, 2 * p.lambda), RatFunc::from_int(1, 2 * p.mu)]);
    LinSystem::new(ctx, vec![a]).expect("rank 2, one derivation")
}

fn monomial(x: i64, y: i64) -> RatFunc {
    let mono = |e: [i64; 2]| MultiPoly::monomial(2, e.map(|v| v.max(0) as u32).to_vec(), QuadScalar::one());
    RatFunc::new(mono([x, y]), mono([-x, -y]))
}

/// `x^mu y^(-lambda)`.
pub fn first_integral(p: &GradientPotential) -> RatFunc {
    monomial(p.mu, -p.lambda)
}

/// Lie derivative `2 lambda x I_x + 2 mu y I_y`.
pub fn lie_derivative(p: &GradientPotential, i: &RatFunc) -> RatFunc {
    let (x, y) = (RatFunc::var(2, 0), RatFunc::var(2, 1));
    let fx = &(&RatFunc::from_int(2, 2 * p.lambda) * &x) * &i.partial(0);
    let fy = &(&RatFunc::from_int(2, 2 * p.mu) * &y) * &i.partial(1);
    &fx + &fy
}

pub fn certify_first_integral(p: &GradientPotential, i: &RatFunc) -> bool {
    lie_derivative(p, i).is_zero()
}

/// Implicit curve `lhs = rhs` over the plane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelCurve {
    pub lhs: MultiPoly,
    pub rhs: MultiPoly,
    /// Both sides are single pure powers with coprime exponents 2 and 3.
    pub cusp: bool,
}

impl fmt::Display for LevelCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = plane().vars().to_vec();
        write!(f, "{} = {}", render_poly(&self.lhs, &names), render_poly(&self.rhs, &names))
    }
}

fn pure_power(p: &MultiPoly) -> Option<(usize, u32)> {
    if p.len() != 1 {
        return None;
    }
    let (e, _) = p.terms().next()?;
    let vars: Vec<usize> = (0..e.len()).filter(|&i| e[i] > 0).collect();
    match vars[..] {
        [v] => Some((v, e[v])),
        _ => None,
    }
}

/// The level set `I = value` with denominators cleared: `value * den = num`.
pub fn level_curve(p: &GradientPotential, value: &Rat) -> LevelCurve {
    assert!(!num_traits::Zero::is_zero(value), "level value must be nonzero");
    let i = first_integral(p);
    let lhs = i.den().scale(&QuadScalar::from_rat(value.clone()));
    let rhs = i.num().clone();
    let cusp = match (pure_power(&lhs), pure_power(&rhs)) {
        (Some((va, a)), Some((vb, b))) => va != vb && a.gcd(&b) == 1 && a.min(b) == 2 && a.max(b) == 3,
        _ => false,
    };
    LevelCurve { lhs, rhs, cusp }
}

/// Curvature of the branch `y = x^(3/2)` of the cusp:
/// `(3/4) x^(-1/2) / (1 + (9/4) x)^(3/2)`. Approximate.
pub fn curvature(x: f64) -> Result<f64, GradientError> {
    if x.is_nan() || x <= 0.0 {
        return Err(GradientError::NonPositiveSample(x.to_string()));
    }
    Ok(0.75 / x.sqrt() / (1.0 + 2.25 * x).powf(1.5))
}

pub fn curvature_samples(xs: &[f64]) -> Result<Vec<(f64, f64)>, GradientError> {
    xs.iter().map(|&x| curvature(x).map(|k| (x, k))).collect()
}
