use thiserror::Error;

/// Errors produced by the analytic and simulation kernels.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Contour quadrature refinements stopped agreeing before the budget ran out.
    #[error("contour integration did not converge (last refinement delta {delta:e})")]
    NonConvergence { delta: f64 },

    /// A closed form that assumes one cascade order across all hops was
    /// invoked on a chain with mixed orders.
    #[error("operation requires identical cascade orders across all hops")]
    MixedCascadeOrder,

    /// A closed form that assumes i.i.d. hops was invoked on a chain whose
    /// hops differ in cascade order or average SNR.
    #[error("operation requires identical hops (same cascade order and average SNR)")]
    NonIdenticalHops,

    /// Wrong number of hops for a specialization.
    #[error("expected {expected} hops, got {got}")]
    HopCount { expected: usize, got: usize },

    /// An input collection was empty.
    #[error("empty input")]
    Empty,

    /// The power-allocation fixed point did not reach tolerance.
    #[error("power allocation did not converge after {iterations} iterations (residual {residual:e})")]
    PaNonConverged { iterations: usize, residual: f64 },

    /// Power allocation is only defined for regenerative chains.
    #[error("operation requires a regenerative relay chain")]
    NotRegenerative,
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = core::result::Result<T, Error>;
