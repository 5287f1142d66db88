//! Linear partial differential systems `d_j Y = A_j Y`, the integrability
//! test, and Kolchin's reduction to one derivation `D = sum u_k d_k`.

use crate::error::SystemError;
use crate::matrix::Matrix;
use crate::ratfunc::{DiffContext, RatFunc};

/// How the derivations of a system act on its context variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Derivations {
    /// One derivation `d/dt_j` per differential variable.
    Partial,
    /// A single derivation `D = sum_k u_k d/dt_k`; the context holds
    /// `t_1..t_m` followed by `u_1..u_m`.
    Kolchin { m: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinSystem {
    ctx: DiffContext,
    derivations: Derivations,
    matrices: Vec<Matrix>,
}

/// Outcome of [`check_integrability`]. Indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Integrability {
    Integrable,
    Witness { i: usize, j: usize, residual: Matrix },
}

impl Integrability {
    pub fn is_integrable(&self) -> bool {
        matches!(self, Integrability::Integrable)
    }
}

fn check_shapes(ctx: &DiffContext, matrices: &[Matrix], expected: usize) -> Result<usize, SystemError> {
    if matrices.len() != expected || expected == 0 {
        return Err(SystemError::MatrixCount { expected, found: matrices.len() });
    }
    let rank = matrices[0].nrows();
    for (index, m) in matrices.iter().enumerate() {
        if m.nrows() != rank || m.ncols() != rank || m.nvars() != ctx.nvars() {
            return Err(SystemError::MatrixShape { index, rows: m.nrows(), cols: m.ncols(), rank });
        }
    }
    Ok(rank)
}

impl LinSystem {
    /// One matrix per differential variable of `ctx`, all `r x r`.
    pub fn new(ctx: DiffContext, matrices: Vec<Matrix>) -> Result<Self, SystemError> {
        check_shapes(&ctx, &matrices, ctx.derivation_count())?;
        Ok(LinSystem { ctx, derivations: Derivations::Partial, matrices })
    }

    /// A one-derivation system over a Kolchin context `t_1..t_m, u_1..u_m`.
    pub fn new_kolchin(ctx: DiffContext, m: usize, a_d: Matrix) -> Result<Self, SystemError> {
        assert_eq!(ctx.nvars(), 2 * m, "Kolchin context needs t and u blocks");
        let matrices = vec![a_d];
        check_shapes(&ctx, &matrices, 1)?;
        Ok(LinSystem { ctx, derivations: Derivations::Kolchin { m }, matrices })
    }

    pub fn ctx(&self) -> &DiffContext {
        &self.ctx
    }

    pub fn derivations(&self) -> &Derivations {
        &self.derivations
    }

    pub fn rank(&self) -> usize {
        self.matrices[0].nrows()
    }

    pub fn derivation_count(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrices(&self) -> &[Matrix] {
        &self.matrices
    }

    pub fn matrix(&self, j: usize) -> &Matrix {
        &self.matrices[j]
    }

    /// The `j`-th derivation applied to a field element.
    pub fn derive(&self, f: &RatFunc, j: usize) -> RatFunc {
        match self.derivations {
            Derivations::Partial => self.ctx.derive(f, j),
            Derivations::Kolchin { m } => kolchin_d(f, m),
        }
    }

    pub fn derive_matrix(&self, a: &Matrix, j: usize) -> Matrix {
        a.map(|e| self.derive(e, j))
    }

    pub fn is_upper_triangular(&self) -> bool {
        self.matrices.iter().all(Matrix::is_upper_triangular)
    }

    /// Block-diagonal sum of two systems over the same context.
    pub fn block_diag(&self, other: &Self) -> Self {
        assert_eq!(self.ctx, other.ctx, "context mismatch");
        assert_eq!(self.derivations, other.derivations, "derivation mismatch");
        let matrices = self.matrices.iter().zip(&other.matrices).map(|(a, b)| a.block_diag(b)).collect();
        LinSystem { ctx: self.ctx.clone(), derivations: self.derivations.clone(), matrices }
    }
}

/// `D f = sum_k u_k d_k f` with the `u` at positions `m..2m` treated as
/// constants.
fn kolchin_d(f: &RatFunc, m: usize) -> RatFunc {
    let n = f.nvars();
    let mut acc = RatFunc::zero(n);
    for k in 0..m {
        let d = f.partial(k);
        if !d.is_zero() {
            acc = &acc + &(&RatFunc::var(n, m + k) * &d);
        }
    }
    acc
}

/// Residual `d_j A_i + A_i A_j - d_i A_j - A_j A_i`.
pub fn integrability_residual(s: &LinSystem, i: usize, j: usize) -> Matrix {
    let (ai, aj) = (s.matrix(i), s.matrix(j));
    let lhs = s.derive_matrix(ai, j).add(&ai.mul(aj));
    let rhs = s.derive_matrix(aj, i).add(&aj.mul(ai));
    lhs.sub(&rhs)
}

/// Tests the compatibility relations for every pair `i < j` and returns the
/// first failing pair with its residual.
pub fn check_integrability(s: &LinSystem) -> Integrability {
    let m = s.derivation_count();
    for i in 0..m {
        for j in (i + 1)..m {
            let residual = integrability_residual(s, i, j);
            if !residual.is_zero() {
                return Integrability::Witness { i, j, residual };
            }
        }
    }
    Integrability::Integrable
}

/// The ordinary system `D Y = A_D Y` over `K(u_1, ..., u_m)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ReducedSystem {
    ctx: DiffContext,
    m: usize,
    a_d: Matrix,
}

impl ReducedSystem {
    /// Reassembles a reduced system from its parts (used by the file reader).
    pub fn from_parts(ctx: DiffContext, m: usize, a_d: Matrix) -> Result<Self, SystemError> {
        LinSystem::new_kolchin(ctx.clone(), m, a_d.clone())?;
        Ok(ReducedSystem { ctx, m, a_d })
    }

    /// Context `t_1..t_m, u_1..u_m`; only the `t` are differential.
    pub fn ctx(&self) -> &DiffContext {
        &self.ctx
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn a_d(&self) -> &Matrix {
        &self.a_d
    }

    pub fn u_names(&self) -> &[String] {
        &self.ctx.vars()[self.m..]
    }

    /// `D f` for `f` polynomial in the `u` block.
    pub fn apply_d(&self, f: &RatFunc) -> Result<RatFunc, SystemError> {
        apply_d(f, self.m)
    }

    /// The reduced system as a one-derivation [`LinSystem`].
    pub fn to_system(&self) -> LinSystem {
        LinSystem::new_kolchin(self.ctx.clone(), self.m, self.a_d.clone()).expect("validated at construction")
    }
}

/// `D f = sum_k u_k d_k f` on a Kolchin context with `m` differential
/// variables. Elements with a `u` in the denominator would need symbols for
/// `D u_k` and are rejected.
pub fn apply_d(f: &RatFunc, m: usize) -> Result<RatFunc, SystemError> {
    if (m..f.nvars()).any(|v| f.den().depends_on(v)) {
        return Err(SystemError::NeedsHigherIndeterminates);
    }
    Ok(kolchin_d(f, m))
}

/// Default names `u1, u2, ...`.
pub fn default_u_names(m: usize) -> Vec<String> {
    (1..=m).map(|k| format!("u{k}")).collect()
}

/// Kolchin reduction with the default `u` names.
pub fn kolchin_reduce(s: &LinSystem) -> Result<ReducedSystem, SystemError> {
    kolchin_reduce_with(s, &default_u_names(s.derivation_count()))
}

pub fn kolchin_reduce_with(s: &LinSystem, u_names: &[String]) -> Result<ReducedSystem, SystemError> {
    if s.derivations != Derivations::Partial || s.ctx.nvars() != s.ctx.derivation_count() {
        // a reduced system already carries its u block
        return Err(SystemError::VariableClash(u_names.first().cloned().unwrap_or_default()));
    }
    let m = s.derivation_count();
    assert_eq!(u_names.len(), m, "one u name per derivation");
    let ctx = s.ctx.extend_constants(u_names.iter().cloned()).map_err(|e| match e {
        crate::error::RatFuncError::VariableClash(v) | crate::error::RatFuncError::DuplicateVariable(v) => {
            SystemError::VariableClash(v)
        }
        other => SystemError::VariableClash(other.to_string()),
    })?;
    let n = ctx.nvars();
    let r = s.rank();
    let mut a_d = Matrix::zeros(r, r, n);
    for (k, a) in s.matrices.iter().enumerate() {
        let u = RatFunc::var(n, m + k);
        a_d = a_d.add(&a.pad_vars(n).scale(&u));
    }
    Ok(ReducedSystem { ctx, m, a_d })
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

    fn scalar(f: RatFunc) -> Matrix {
        Matrix::from_rows(vec![vec![f]]).unwrap()
    }

    #[test]
    fn exponential_system_and_corruption() {
        let s = LinSystem::new(ctx(), vec![scalar(t(1)), scalar(t(0))]).unwrap();
        assert!(check_integrability(&s).is_integrable());
        let bad = LinSystem::new(ctx(), vec![scalar(t(1)), scalar(RatFunc::zero(2))]).unwrap();
        match check_integrability(&bad) {
            Integrability::Witness { i, j, residual } => {
                assert_eq!((i, j), (0, 1));
                assert!(residual.get(0, 0).is_one());
            }
            Integrability::Integrable => panic!("corrupted system accepted"),
        }
    }

    #[test]
    fn reduction_of_exponential_system() {
        let s = LinSystem::new(ctx(), vec![scalar(t(1)), scalar(t(0))]).unwrap();
        let r = kolchin_reduce(&s).unwrap();
        let v = |i| RatFunc::var(4, i);
        let expect = &(&v(2) * &v(1)) + &(&v(3) * &v(0));
        assert!(r.a_d().get(0, 0).equals(&expect));
    }

    #[test]
    fn apply_d_examples() {
        let v = |i| RatFunc::var(4, i);
        assert!(apply_d(&(&v(0) * &v(1)), 2).unwrap().equals(&(&(&v(2) * &v(1)) + &(&v(3) * &v(0)))));
        assert!(apply_d(&(&v(2) * &v(0)), 2).unwrap().equals(&(&v(2) * &v(2))));
        assert!(apply_d(&RatFunc::from_int(4, 5), 2).unwrap().is_zero());
        assert_eq!(apply_d(&v(2).inv(), 2), Err(SystemError::NeedsHigherIndeterminates));
    }

    #[test]
    fn shape_errors() {
        assert!(matches!(
            LinSystem::new(ctx(), vec![scalar(t(1))]),
            Err(SystemError::MatrixCount { expected: 2, found: 1 })
        ));
        let two = Matrix::identity(2, 2);
        assert!(matches!(LinSystem::new(ctx(), vec![scalar(t(1)), two]), Err(SystemError::MatrixShape { index: 1, .. })));
    }

    #[test]
    fn u_name_clash() {
        let c = DiffContext::new(["u1", "t2"], None).unwrap();
        let s = LinSystem::new(c, vec![scalar(RatFunc::zero(2)), scalar(RatFunc::zero(2))]).unwrap();
        assert_eq!(kolchin_reduce(&s), Err(SystemError::VariableClash("u1".into())));
    }
}
