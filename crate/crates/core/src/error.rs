//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Everything that can go wrong when validating matrices or running the
/// embedding solvers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A row sum is off its required value (1 for stochastic, 0 for rate
    /// matrices) by more than the validation tolerance.
    #[error("row {row} sums to {sum:.17e}, expected {expected} within {tol:.3e}")]
    RowSumViolation {
        row: usize,
        sum: f64,
        expected: f64,
        tol: f64,
    },

    /// A stochastic matrix entry is below -tol.
    #[error("entry ({row},{col}) = {value:.17e} is negative beyond tolerance {tol:.3e}")]
    NegativeEntry {
        row: usize,
        col: usize,
        value: f64,
        tol: f64,
    },

    /// An off-diagonal rate matrix entry is below -tol.
    #[error("off-diagonal entry ({row},{col}) = {value:.17e} violates the Metzler sign condition")]
    MetzlerViolation { row: usize, col: usize, value: f64 },

    /// Matrix contains NaN or infinite entries.
    #[error("matrix contains a non-finite entry at ({row},{col})")]
    NonFinite { row: usize, col: usize },

    /// Entry count does not match the declared dimension, or an operation
    /// received a matrix of the wrong size.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The principal logarithm is undefined: an eigenvalue lies on the
    /// closed negative real axis.
    #[error("eigenvalue {re:.6e}{im:+.6e}i lies on the closed negative real axis; principal logarithm undefined")]
    SpectrumOnCut { re: f64, im: f64 },

    /// Matrix is singular (or numerically so).
    #[error("matrix is singular")]
    Singular,

    /// An iterative method did not reach its residual target.
    #[error("{method} did not converge; residual {residual:.3e}")]
    ConvergenceFailure { method: &'static str, residual: f64 },

    /// Unit-circle spectrum besides 1: the power limit does not exist.
    #[error("peripheral spectrum: eigenvalue of modulus 1 besides 1; the power limit does not exist")]
    PeripheralSpectrum,

    /// e^Q does not reproduce the matrix it was claimed to generate.
    #[error("exp(Q) differs from M by {residual:.3e}; the pair is inconsistent")]
    OracleMismatch { residual: f64 },

    /// Input is not of equal-input form.
    #[error("matrix is not of equal-input form")]
    NotEqualInput,

    /// Combined summatory parameter vanishes, the product generator formula
    /// is undefined.
    #[error("summatory parameters add to zero; product generator undefined")]
    DegenerateSum,

    /// Parameter constraint violated (for closed-form generator families).
    #[error("parameter constraint violated: {0}")]
    ConstraintViolation(String),

    /// Input is not doubly stochastic.
    #[error("matrix is not doubly stochastic")]
    NotDoublyStochastic,

    /// Input is not symmetric.
    #[error("matrix is not symmetric")]
    NotSymmetric,

    /// Scalar parameter outside the domain of the requested construction.
    #[error("parameter out of domain: {0}")]
    OutOfDomain(String),

    /// Requested dimension exceeds what the operation supports.
    #[error("dimension {dim} exceeds the supported maximum {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    /// Branch enumeration requires a matrix with simple spectrum
    /// (equivalently a cyclic matrix) that is numerically well conditioned.
    #[error("matrix is not cyclic (repeated eigenvalues or defective eigenbasis): {0}")]
    NotCyclic(String),

    /// Zero eigenvalue: no logarithm of any kind exists.
    #[error("matrix has a zero eigenvalue; no logarithm exists")]
    SingularInput,

    /// Internal consistency check failed; indicates a bug or an input far
    /// outside the supported numerical range.
    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
