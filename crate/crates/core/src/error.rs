use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The caller violated an API precondition (empty lists, bad counts, ...).
    #[error("usage error: {0}")]
    Usage(String),

    /// The family collapsed to a single state (zero angular spread).
    #[error("degenerate family: boundary states coincide")]
    DegenerateFamily,

    /// Two independent routes to the same quantity disagree.
    #[error("internal consistency error: {0}")]
    Inconsistent(String),

    /// The constrained search never reached the feasible set.
    #[error("no feasible point found: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;
