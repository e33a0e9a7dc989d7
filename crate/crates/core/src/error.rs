use thiserror::Error;

/// Errors raised by the library. Variants are kept coarse: callers mostly
/// need to tell bad input apart from exhausted budgets and misbehaving peers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CspError {
    /// Malformed or out-of-contract input (arity mismatch, repeated indices, ...).
    #[error("input error: {0}")]
    Input(String),
    /// A configured budget or materialization cap was exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    /// An oracle or hidden algorithm broke the query protocol.
    #[error("protocol violation: {0}")]
    Protocol(String),
    /// A solver backend returned an answer its contract forbids.
    #[error("backend contract violation: {0}")]
    Contract(String),
    /// A required precondition of a construction does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// Text that could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
    /// Internal invariant broken; always a bug.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, CspError>;

macro_rules! input_err {
    ($($arg:tt)*) => { $crate::error::CspError::Input(format!($($arg)*)) };
}
pub(crate) use input_err;
