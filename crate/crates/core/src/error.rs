use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("weight not non-increasing: {0:?}")]
    InvalidWeight(Vec<i64>),

    #[error("index out of range: {0}")]
    Index(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A quantity that must be non-negative (a squared matrix coefficient) came
    /// out negative. Always a bug in index bookkeeping, never a user error.
    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("window too small: no interior basis vectors")]
    EmptyInterior,

    #[error("zero denominator: {0}")]
    ZeroDenominator(String),

    #[error("q-number factor vanishes on the edge from {weight:?} in direction {direction}; use analytic_order")]
    VanishingFactor { weight: Vec<i64>, direction: usize },

    #[error("intertwiner recursion is path dependent (relative deviation {deviation:e})")]
    InconsistentLoop { deviation: f64 },

    #[error("c1 + c2 = {0} is not an integer")]
    NonIntegerSum(String),

    #[error("c0 = {0} is not an integer")]
    NonIntegerPoint(String),

    #[error("A(c1) is regular at c1 = {0}; there is no residue")]
    NotAPole(i64),

    #[error("parameters are irreducible; nothing to decompose")]
    Irreducible,

    #[error("no intertwining operator toward the Hermitian-adjoint parameters")]
    NotComparable,
}
