use thiserror::Error;

use crate::digits::{BaseClass, Digit};

/// Errors raised by the library.
///
/// Variants split into two families: input validation problems (bad digit
/// strings, unsupported bases, failed preconditions) and internal consistency
/// failures, which indicate that two independent computations disagreed.
/// [`Error::is_internal`] tells them apart; the command-line tool maps them to
/// different exit codes.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("digit {digit} exceeds the alphabet bound M = {m}")]
    Alphabet { digit: u32, m: Digit },

    #[error("cannot parse digit sequence {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("{0} is not the greedy expansion of 1 in any base")]
    NotGreedy(String),

    #[error("{0} is not the quasi-greedy expansion of 1 in any base")]
    NotQuasiGreedy(String),

    #[error("the sequence describes the base q = 1, which is outside every construction")]
    BaseIsOne,

    #[error("operation requires a base in V \\ U, but the base is classified {0:?}")]
    UnsupportedClass(BaseClass),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("value {0} lies outside [0, M/(q-1)]")]
    OutOfRange(String),

    #[error("no eventually periodic pattern found within {0} steps")]
    BoundExceeded(usize),

    #[error("tail sequence rejected: {0}")]
    FilterFailed(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
}

impl Error {
    /// True for failures where two independent routes to the same answer
    /// disagreed, as opposed to bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Inconsistent(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
