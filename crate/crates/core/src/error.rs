use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry in matrix input")]
    NonFinite,

    #[error("all columns are negligible (filtered block vanished)")]
    AllColumnsNegligible,

    #[error("Jacobi iteration did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("matrix is not Hermitian (relative asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (smallest eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("operator maps the start vector to zero")]
    ZeroOperator,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unsupported Matrix Market format: {0}")]
    UnsupportedFormat(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("degenerate interval ({alpha}, {beta})")]
    DegenerateInterval { alpha: f64, beta: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("contour nodes are not closed under conjugation")]
    NotConjugateSymmetric,

    #[error("conjugate reduction requires real data")]
    ComplexData,

    #[error("shifted matrix is numerically singular at xi = {xi}")]
    SingularShift { xi: Complex64 },

    #[error("subspace pair is not orthonormalized")]
    NotOrthonormalized,

    #[error("B does not have full column rank")]
    BNotFullRank,

    #[error("degenerate eigenvalue split: {0}")]
    DegenerateSplit(String),

    #[error("spectral split condition violated: {0}")]
    SplitViolated(String),

    #[error("leading block is singular")]
    SingularLeadingBlock,

    #[error("initial guess has wrong dimensions: {0}")]
    GuessDimensionMismatch(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
