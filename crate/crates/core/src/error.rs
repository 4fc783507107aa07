//! Error type shared by every module.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("{routine} did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    NonConvergence {
        routine: &'static str,
        sweeps: usize,
        residual: f64,
    },

    #[error("matrix is singular to working precision")]
    Singular,

    /// A mathematical hypothesis does not hold for the supplied data.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    /// The requested index lies outside the admissible range of the reference matrix.
    #[error("index out of range: {0}")]
    OutOfRange(String),

    /// A construction needs a subspace intersection the data does not provide.
    #[error("geometry: {0}")]
    Geometry(String),

    /// The request is possible only in infinite dimension.
    #[error("finite-dimensional obstruction: {0}")]
    Obstruction(String),

    /// Input lies outside the domain of a functional calculus (e.g. not positive semidefinite).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("tail integral {tail:e} beyond the truncation point exceeds {tol:e}")]
    Truncation { tail: f64, tol: f64 },

    #[error("projection gap {gap} is not below 1")]
    GapTooLarge { gap: f64 },

    #[error("perturbation ratio {ratio} is outside the convergence radius")]
    Radius { ratio: f64 },

    #[error("quadrature did not reach {tol:e} with {nodes} nodes (last change {change:e})")]
    Quadrature { nodes: usize, change: f64, tol: f64 },

    /// Two routes to the same quantity disagree.
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn hyp(msg: impl Into<String>) -> Self {
        Error::Hypothesis(msg.into())
    }

    pub(crate) fn inconsistent(msg: impl Into<String>) -> Self {
        Error::Inconsistent(msg.into())
    }
}
