//! Error type shared across the crate.

use alloc::string::String;
use core::fmt;

/// Errors raised by scenario validation, estimator preconditions, and the
/// simulation entry points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An estimator received an empty report list.
    EmptyReports,
    /// Reports must be orderable; a NaN report is rejected outright.
    NanReport { index: usize },
    /// Rejection averaging needs `reports >= 2 * level + 1`.
    TrimLevelTooHigh { reports: usize, level: usize },
    /// A scenario violated a structural invariant.
    InvalidScenario(String),
    /// An argument violated an operation's precondition.
    InvalidArgument(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyReports => write!(f, "report list is empty"),
            Error::NanReport { index } => write!(f, "report at index {index} is NaN"),
            Error::TrimLevelTooHigh { reports, level } => write!(
                f,
                "rejection level {level} needs at least {} reports, got {reports}",
                2 * level + 1
            ),
            Error::InvalidScenario(msg) => write!(f, "invalid scenario: {msg}"),
            Error::InvalidArgument(msg) => write!(f, "{msg}"),
        }
    }
}

impl core::error::Error for Error {}
