use thiserror::Error;

use crate::congruence::Partition;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("division by zero: {0}")]
    Division(String),

    /// A nonzero integer vector evaluated to zero under the linear form.
    #[error("linear dependence: vector {vector:?} has zero value")]
    Dependence { vector: Vec<String> },

    /// An elementary refinement step whose precondition does not hold.
    #[error("invalid refinement step {index}: {reason}")]
    InvalidStep { index: usize, reason: String },

    /// A step or size budget ran out. `partial` carries whatever the
    /// computation had established so far, when that makes sense.
    #[error("budget exhausted: {what} (limit {limit})")]
    Budget {
        what: String,
        limit: usize,
        partial: Option<Box<Partition>>,
    },

    /// An internal cross-check between two independent routes disagreed.
    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_)
            | Error::Division(_)
            | Error::Dependence { .. }
            | Error::InvalidStep { .. }
            | Error::Unsupported(_) => 2,
            Error::Budget { .. } => 3,
            Error::Consistency(_) => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
