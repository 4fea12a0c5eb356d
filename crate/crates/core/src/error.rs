use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// The variants map onto the failure classes reported by the command line
/// front-end: capability/unsupported inputs are configuration problems,
/// accuracy failures are numerical problems.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A request beyond what the implementation can compute exactly
    /// (derivative order above the configured maximum, missing smoothness).
    #[error("capability exceeded: {0}")]
    Capability(String),

    /// The input is outside the supported class (non-monotone dispersion,
    /// resonance at a support boundary, ...).
    #[error("unsupported input: {0}")]
    Unsupported(String),

    /// A numerical tolerance could not be met.
    #[error("accuracy target {requested:e} not reached (achieved {achieved:e}): {context}")]
    Accuracy {
        context: String,
        requested: f64,
        achieved: f64,
    },

    /// Not enough usable samples for a fit.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A least-squares fit whose design matrix is too ill-conditioned.
    #[error("ill-conditioned fit (condition number {0:e})")]
    IllConditioned(f64),

    /// The Fock-space truncation would discard a nonzero component.
    #[error("truncation overflow: level {level} is nonzero at truncation {max}")]
    Truncation { level: usize, max: usize },

    /// Operands live on different grids or have incompatible shapes.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A parameter violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn accuracy(context: impl Into<String>, requested: f64, achieved: f64) -> Self {
        Error::Accuracy {
            context: context.into(),
            requested,
            achieved,
        }
    }
}
