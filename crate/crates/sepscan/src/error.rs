//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by state construction, linear algebra and the
/// localization algorithms.
#[derive(Debug, Error)]
pub enum Error {
    #[error("block too small to bipartition ({members} members)")]
    BlockTooSmall { members: usize },

    #[error("partition enumeration for n={n} exceeds cap {cap}")]
    EnumerationCap { n: usize, cap: usize },

    #[error("counting overflow at n={n}: value exceeds 128-bit range")]
    CountOverflow { n: usize },

    #[error("partitions live on different ambient sets")]
    AmbientMismatch,

    #[error("invalid index block: {0}")]
    InvalidBlock(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix entries must be finite")]
    NonFiniteEntries,

    #[error("svd did not converge after {iterations} iterations on a {rows}x{cols} matrix")]
    SvdNonConvergence {
        rows: usize,
        cols: usize,
        iterations: usize,
    },

    #[error("eigendecomposition did not converge for a {dim}x{dim} matrix")]
    EigNonConvergence { dim: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("null state")]
    NullState,

    #[error("tolerance must lie in (0, 1), got {0}")]
    BadTolerance(f64),

    #[error("state vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },

    #[error("invalid mixture weights: {0}")]
    BadWeights(String),

    #[error("basis digit {digit} out of range for local dimension {dim}")]
    DigitOutOfRange { digit: usize, dim: usize },

    #[error("local dimension must be at least 2, got {0}")]
    BadLocalDimension(usize),

    #[error("total Hilbert dimension exceeds cap {cap}")]
    HilbertCap { cap: usize },

    #[error("oracle_pure requires pure state (largest eigenvalue {largest})")]
    OracleRequiresPure { largest: f64 },

    #[error("unknown oracle '{0}' (expected pure, ppt or ccnr)")]
    UnknownOracle(String),

    #[error("duplicate oracle '{0}' in registry")]
    DuplicateOracle(String),

    #[error("empty oracle registry")]
    EmptyRegistry,

    #[error(
        "conflicting oracle verdicts: {first_name} says {first_verdict} ({first_certificate}), \
         {second_name} says {second_verdict} ({second_certificate})"
    )]
    OracleConflict {
        first_name: String,
        first_verdict: String,
        first_certificate: String,
        second_name: String,
        second_verdict: String,
        second_certificate: String,
    },

    #[error("reduced side dimension {dim} exceeds cap {cap}")]
    ReducedSideCap { dim: usize, cap: usize },

    #[error("brute-force search limited to n <= {cap}, got n={n}")]
    BruteForceCap { n: usize, cap: usize },

    #[error("werner parameter p={0} outside [0, 1]")]
    WernerParameter(f64),

    #[error("state spec error at '{token}': {reason}")]
    SpecParse { token: String, reason: String },

    #[error("file format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
