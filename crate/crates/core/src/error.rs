// SPDX-License-Identifier: MIT OR Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A point was evaluated outside the function's domain.
    #[error("point {point} lies outside the domain [{lo}, {hi}]")]
    Domain { point: f64, lo: f64, hi: f64 },

    /// A constructor or operation received arguments violating an invariant.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// Two functions that must share a domain do not.
    #[error("domain mismatch: {0}")]
    Mismatch(String),

    #[error("degenerate model: {0}")]
    Degenerate(String),

    #[error("did not converge: {0}")]
    NonConvergence(String),

    /// More replications failed than the harness tolerates.
    #[error("{failed} of {total} replications failed (first: {first})")]
    Replications {
        failed: usize,
        total: usize,
        first: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {{
        // bound first so a NaN comparison fails the check
        let ok: bool = $cond;
        if !ok {
            return Err($crate::error::Error::Invalid(format!($($arg)+)));
        }
    }};
}
pub(crate) use ensure;
