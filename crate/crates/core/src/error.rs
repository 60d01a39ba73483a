use std::io;

use thiserror::Error;

use crate::transport::AbortReason;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("invalid input: {0}")]
    Input(String),

    /// Pruned decoding requested with `|T| >= κ/2`; the pruned code is no
    /// longer guaranteed to separate codewords.
    #[error("pruned decoding is ambiguous: |T| = {pruned} >= kappa/2 = {half}")]
    Ambiguity { pruned: usize, half: usize },

    #[error("protocol violation: {0}")]
    Protocol(String),

    /// Consistency check failed at the given 1-based iteration.
    #[error("consistency check failed at iteration {iteration}")]
    CheckFailed { iteration: usize },

    #[error("session refused: {0:?}")]
    Refused(AbortReason),

    #[error("peer aborted the session: {0:?}")]
    PeerAbort(AbortReason),

    #[error("transport error: {0}")]
    Transport(#[from] io::Error),
}

impl Error {
    /// True for the error classes that end a session as a protocol abort
    /// (as opposed to a transport failure or a local usage mistake).
    pub fn is_abort(&self) -> bool {
        matches!(
            self,
            Error::CheckFailed { .. }
                | Error::Refused(_)
                | Error::PeerAbort(_)
                | Error::Protocol(_)
        )
    }

    /// The wire reason code that best describes this error, if any.
    pub fn abort_reason(&self) -> Option<AbortReason> {
        match self {
            Error::CheckFailed { .. } => Some(AbortReason::CheckFailed),
            Error::Refused(r) | Error::PeerAbort(r) => Some(*r),
            Error::Protocol(_) => Some(AbortReason::ProtocolViolation),
            Error::Param(_) => Some(AbortReason::InvalidParams),
            _ => None,
        }
    }
}
