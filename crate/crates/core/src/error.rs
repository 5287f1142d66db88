use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("mixed radicands sqrt({0}) and sqrt({1}) in one expression")]
    MixedRadicand(String, String),
    #[error("negative discriminant {0}: roots are not real")]
    NegativeDiscriminant(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("radicand {0} is not square-free and greater than 1")]
    NotSquareFree(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RatFuncError {
    #[error("expression involves more than the variable {0}")]
    NotUnivariate(String),
    #[error("incompatible partials: d{i} f{j} != d{j} f{i}", i = .0 + 1, j = .1 + 1)]
    CompatibilityViolation(usize, usize),
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("variable `{0}` already exists in the context")]
    VariableClash(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("expected {expected} matrices (one per derivation), got {found}")]
    MatrixCount { expected: usize, found: usize },
    #[error("matrix {index} is {rows}x{cols}, expected {rank}x{rank}")]
    MatrixShape { index: usize, rows: usize, cols: usize, rank: usize },
    #[error("variable `{0}` already exists in the context")]
    VariableClash(String),
    #[error("expression needs derivatives of the u-indeterminates (u in a denominator)")]
    NeedsHigherIndeterminates,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TowerError {
    #[error("step {step}: incompatible coefficients, d{i} c{j} != d{j} c{i}", i = .i + 1, j = .j + 1)]
    CompatibilityViolation { step: String, i: usize, j: usize },
    #[error("step {0}: coefficient does not lie in the field below the step")]
    CoefficientOutsideField(String),
    #[error("step {0}: minimal polynomial is reducible")]
    ReducibleMinimalPolynomial(String),
    #[error("step {0}: {1}")]
    DegenerateStep(String, String),
    #[error("step {0}: step kind not supported here")]
    UnsupportedStep(String),
    #[error("generator name `{0}` clashes with an existing name")]
    NameClash(String),
    #[error("system is not upper triangular")]
    NotTriangular,
    #[error("system is not integrable: pair ({0}, {1}) fails the compatibility relation")]
    NotIntegrable(usize, usize),
    #[error("matrix is {rows}x{cols}, expected {rank}x{rank}")]
    MatrixShape { rows: usize, cols: usize, rank: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GaloisError {
    #[error("system is not integrable: pair ({0}, {1}) fails the compatibility relation")]
    NotIntegrable(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GradientError {
    #[error("coefficients must be nonzero")]
    ZeroCoefficient,
    #[error("sample {0} is not positive")]
    NonPositiveSample(String),
}
