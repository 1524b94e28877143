use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("sphere dimension must be >= 2, got d = {0}")]
    InvalidDimension(usize),

    #[error("degree {m} is too large for exact dimension counts on S^{d}")]
    DegreeOverflow { d: usize, m: usize },

    #[error("argument {0} lies outside [-1, 1]")]
    OutOfDomain(f64),

    #[error("degree {m} <= k = {k}: no closed form, use the quadrature projection")]
    QuadratureBranch { m: usize, k: usize },

    #[error("xi(t) requires t > k, got t = {t} with k = {k}")]
    XiDomain { t: f64, k: usize },

    #[error("dyadic levels 0..={q_max} do not cover m = {m}")]
    IncompleteCover { m: u64, q_max: u32 },

    #[error("vector is not unit length (|norm - 1| = {0:e})")]
    NonUnitVector(f64),

    #[error("need at least {min} points, got {n}")]
    TooFewPoints { n: usize, min: usize },

    #[error("candidate pool exhausted after {found} of {requested} points; retry with a larger pool")]
    PoolExhausted { found: usize, requested: usize },

    #[error("antipodal separation is zero: the point set contains an antipodal pair")]
    AntipodalDegeneracy,

    #[error("truncation degree {have} is too small, need at least {need}")]
    InsufficientDegree { have: usize, need: usize },

    #[error("symmetric eigensolver did not converge after {iterations} iterations (matrix norm {norm:e})")]
    EigenNonConvergence { iterations: usize, norm: f64 },

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
