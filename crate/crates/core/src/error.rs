use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("covariance matrix must be 4x4, got {rows}x{cols}")]
    BadShape { rows: usize, cols: usize },
    #[error("covariance matrix not symmetric: |Γ[{i}][{j}] - Γ[{j}][{i}]| = {deviation:e}")]
    NonSymmetric { i: usize, j: usize, deviation: f64 },
    #[error("transform is not symplectic: max |S J Sᵀ - J| = {deviation:e}")]
    InvalidTransform { deviation: f64 },
    #[error("efficiency {0} outside [0, 1]")]
    BadEfficiency(f64),
    #[error("separability must be positive, got {0}")]
    NonPositiveSeparability(f64),
    #[error("conditioning variance must be positive, got {0}")]
    DegenerateVariance(f64),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("variance must be positive, got {0}")]
    NonPositiveVariance(f64),
    #[error("invalid correlation statistics: {0}")]
    BadStats(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("unphysical block: v1·v2 = {0} < 1")]
    UnphysicalBlock(f64),
    #[error("derived correlation coefficient {0} outside [-1, 1]")]
    BadCorrelation(f64),
    #[error("no samples fell inside the selection band")]
    EmptySelection,
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
