use thiserror::Error;

use crate::numerics::quadrature::QuadratureError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The quantity is undefined at the requested point (pole, T = 0 where
    /// a finite temperature is required, pure state without an effective
    /// temperature, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature failed ({context}): {source}")]
    Quadrature {
        context: String,
        #[source]
        source: QuadratureError,
    },

    /// Two independent routes to the same quantity disagree beyond their
    /// stated tolerance.
    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("degenerate variation: {0}")]
    DegenerateVariation(String),

    #[error("model construction failed: {0}")]
    ModelConstruction(String),

    #[error("root finding failed: {0}")]
    RootFinding(String),
}

impl Error {
    pub(crate) fn quadrature(context: impl Into<String>, source: QuadratureError) -> Self {
        Error::Quadrature { context: context.into(), source }
    }
}
