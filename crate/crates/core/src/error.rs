use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("polytope is degenerate (empty interior or fewer than {0} vertices)")]
    DegeneratePolytope(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid directional distribution: {0}")]
    InvalidDistribution(String),

    #[error("separating measure vanished at facet {facet}; the directional distribution gives this facet pair no separating hyperplanes")]
    AssumptionFailed { facet: usize },

    #[error("cell count {cells} exceeded the explosion guard cap {cap}")]
    ExplosionGuard { cells: usize, cap: usize },

    #[error("rejection sampling failed to accept within {0} iterations")]
    RejectionLoopExceeded(usize),

    #[error("nested tessellation supply exhausted at cell index {0}")]
    NestingSupplyExhausted(usize),

    #[error("atom table is empty")]
    EmptyTable,

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
