//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by validation, bound evaluators and the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: defect {defect:e} exceeds tolerance {tol:e}")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("operator is not positive semidefinite: eigenvalue {eigenvalue:e} below -{tol:e}")]
    NotPsd { eigenvalue: f64, tol: f64 },

    #[error("operators do not sum to the identity: Frobenius deviation {deviation:e}")]
    NotComplete { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("invalid dimension {dim}: {reason}")]
    InvalidDim { dim: usize, reason: &'static str },

    #[error("noise parameter {eta} outside [0, 1]")]
    EtaOutOfRange { eta: f64 },

    #[error("degenerate sample: normalisation operator has eigenvalue {eigenvalue:e}")]
    DegenerateSample { eigenvalue: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("{quantity} = {value} outside the admissible range [{lo}, {hi}]")]
    OutOfRange {
        quantity: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error(
        "success probability {p_bar} not above the threshold {p_0}; the bound is vacuous there"
    )]
    NontrivialRegionRequired { p_bar: f64, p_0: f64 },

    #[error("denominator {value:e} too close to zero")]
    DegenerateDenominator { value: f64 },

    #[error("not a probability distribution: {reason}")]
    NotADistribution { reason: String },

    #[error("consistency check '{check}' violated with margin {margin:e}")]
    ConsistencyViolation { check: &'static str, margin: f64 },

    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },

    #[error("unknown suite '{0}'")]
    UnknownSuite(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
