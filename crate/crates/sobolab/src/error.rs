use thiserror::Error;

/// Errors produced by grid construction, spectral operators, norm
/// evaluators and the verification harness.
#[derive(Debug, Error)]
pub enum Error {
    /// A grid invariant was violated (points per axis, period, dimension).
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// Two operands live on different grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A named precondition of an operation was violated.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A spectral multiplier evaluated to a non-finite value on the
    /// eigenvalue lattice.
    #[error("multiplier evaluates to a non-finite value at lambda = {lambda}")]
    NonFiniteMultiplier { lambda: f64 },

    /// The thermic Besov sup diverges for functions with nonzero mean on
    /// the torus.
    #[error("Besov norm divergent on torus")]
    BesovDivergent,

    /// A corpus member violates the generation invariants.
    #[error("corpus member {index} invalid: {reason}")]
    CorpusMember { index: usize, reason: String },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed input file or descriptor.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
