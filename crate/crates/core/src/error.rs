use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max |M - M*| = {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is singular for this function (min eigenvalue {min_eig:e})")]
    SingularMatrix { min_eig: f64 },

    #[error("{n} sites requested, at most {max} supported")]
    DimensionTooLarge { n: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid regions: {0}")]
    InvalidRegions(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("state is not faithful (min eigenvalue {min_eig:e})")]
    NotFaithful { min_eig: f64 },

    #[error("reference density is not faithful (min eigenvalue {min_eig:e})")]
    SingularReference { min_eig: f64 },

    #[error("restricted density is not invertible (min eigenvalue {min_eig:e})")]
    SingularRestriction { min_eig: f64 },

    #[error("subspace is not a *-algebra (closure residual {residual:e})")]
    NotAnAlgebra { residual: f64 },

    #[error("random central elements failed to separate the center after {retries} attempts")]
    DegenerateCenter { retries: usize },

    #[error("subalgebra is not sufficient for the pair of states")]
    NotSufficient,

    #[error("subalgebra is not stable under the modular flow (residual {residual:e})")]
    FlowUnstable { residual: f64 },

    #[error("state does not saturate strong subadditivity (gap {gap:e} nats)")]
    NotSaturated { gap: f64 },

    #[error("factorization failed: {0}")]
    FactorizationFailed(String),

    #[error("state is not even (max |rho - Theta(rho)| = {residual:e})")]
    NotEven { residual: f64 },

    #[error("state is not a Markov triplet")]
    NotMarkov,

    #[error("parity automorphism does not permute the central projections (residual {residual:e})")]
    UnmatchedParityAction { residual: f64 },

    #[error("block certification failed: {0}")]
    BlockCertificationFailed(String),

    #[error("generated factors do not commute after {retries} attempts")]
    CommutationFailed { retries: usize },

    #[error("region B too small: {0}")]
    RegionTooSmall(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
