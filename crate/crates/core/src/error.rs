//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("dense {dim}x{dim} matrix needs {needed} bytes, over the {budget}-byte budget")]
    ResourceLimit {
        dim: usize,
        needed: usize,
        budget: usize,
    },

    #[error("operator does not commute with reflection (max commutator entry {max_entry:.3e}); it leaks between parity sectors")]
    SymmetryViolation { max_entry: f64 },

    #[error("matrix is not Hermitian (max deviation {max_dev:.3e} relative to scale {scale:.3e})")]
    NotHermitian { max_dev: f64, scale: f64 },

    #[error("cannot expand a zero operator")]
    ZeroOperator,

    #[error("site index {site} outside 1..={l}")]
    SiteOutOfRange { site: usize, l: usize },

    #[error("coefficient b[{index}] = {value} must be positive and finite")]
    NonPositiveCoefficient { index: usize, value: f64 },

    #[error("need at least {needed} values, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("Krylov basis was not stored; rerun with store_basis enabled")]
    BasisAbsent,

    #[error("time grid must be finite, sorted ascending and start at t >= 0")]
    InvalidTimeGrid,

    #[error("degenerate spectrum: spacing {spacing:.3e} below resolution {resolution:.3e}; desymmetrize the Hamiltonian first")]
    DegenerateSpectrum { spacing: f64, resolution: f64 },

    #[error("energy levels must be sorted ascending")]
    UnsortedSpectrum,

    #[error("constant series cannot be rescaled")]
    ConstantSeries,

    #[error("saturation window has {got} samples, need at least {needed}")]
    InsufficientWindow { got: usize, needed: usize },

    #[error("tridiagonal eigensolver failed to converge at index {0}")]
    NoConvergence(usize),

    #[error("invalid operator spec '{spec}': {reason}")]
    InvalidOperatorSpec { spec: String, reason: String },

    #[error("unknown figure '{0}' (expected fig1..fig8)")]
    UnknownFigure(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Wrap an error with information about which sweep point produced it.
    pub fn with_context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}
