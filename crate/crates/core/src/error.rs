use thiserror::Error;

/// Errors raised by the construction and verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("circulant first row is not symmetric: m[{index}] != m[n - {index}]")]
    NonSymmetricCirculant { index: usize },
    #[error("jacobi iteration did not converge after {rotations} rotations (off-diagonal norm {off_norm:e})")]
    NoConvergence { rotations: usize, off_norm: f64 },
    #[error("cost matrix violates the triangle inequality: c[{i}][{j}] > c[{i}][{k}] + c[{k}][{j}]")]
    NotMetric { i: usize, j: usize, k: usize },
    #[error("cost matrix has invalid entry at ({row}, {col}): {reason}")]
    InvalidCost {
        row: usize,
        col: usize,
        reason: &'static str,
    },
    #[error("closed-form and direct evaluation disagree for k = {k}: {closed} vs {direct}")]
    IdentityViolation { k: usize, closed: f64, direct: f64 },
    #[error("witness failed verification: {0}")]
    InfeasibleWitness(String),
    #[error("simplex exceeded {0} pivots")]
    IterationLimit(usize),
    #[error("k = {k} is even but c = {c} is odd")]
    Parity { k: usize, c: usize },
    #[error("row {row} sums to {sum}, expected 2")]
    RowSum { row: usize, sum: f64 },
    #[error("direct and reduced PSD verdicts disagree (direct min eig {direct:e}, lambda2 - h_n {reduced:e})")]
    VerdictMismatch { direct: f64, reduced: f64 },
    #[error("matrix has nonzero diagonal entry at {0}")]
    NonzeroDiagonal(usize),
    #[error("instance too large for exhaustive enumeration: n = {n} > {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("closed-form inverse failed verification: max deviation {0:e}")]
    VerificationFailed(f64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
