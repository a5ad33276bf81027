use thiserror::Error;

use crate::lie_group::Group;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("group mismatch: {left} vs {right}")]
    GroupMismatch { left: Group, right: Group },

    #[error("{op} is not supported on {group}")]
    Unsupported { op: &'static str, group: Group },

    #[error("invalid group element: {0}")]
    InvalidElement(String),

    #[error("grid mismatch: {0} vs {1}")]
    GridMismatch(usize, usize),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("infeasible marginals: {0}")]
    InfeasibleMarginals(String),

    #[error("sinkhorn did not converge after {iterations} iterations (marginal violation {violation:e})")]
    NotConverged { iterations: usize, violation: f64 },

    #[error("coupling is not optimal: {0}")]
    NotOptimal(String),

    #[error("unknown method: {0}")]
    UnknownMethod(String),

    #[error("unknown verification suite: {0}")]
    UnknownSuite(String),

    #[error("malformed bundle: {0}")]
    Format(String),
}
