use crate::diagnostics::Diagnostics;
use crate::ids::VertexId;

/// How a failure should be reported to a caller such as the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorClass {
    /// The input object is malformed or violates a structural invariant.
    Validation,
    /// The input is well formed but outside the operation's domain.
    Precondition,
    /// An internal invariant broke. Always a bug.
    Internal,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input:\n{0}")]
    Invalid(Diagnostics),

    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("edge marking at a non-integral position; base change by {splitting_index} first")]
    NonIntegralMarking { splitting_index: u64 },

    #[error("base change index must be positive")]
    ZeroIndex,

    #[error("{rule}: {message}")]
    Precondition {
        rule: &'static str,
        elements: Vec<String>,
        message: String,
    },

    #[error("enumeration bound exceeded: {size} > {bound}")]
    BoundExceeded { size: usize, bound: usize },

    #[error("verification failure: {0}")]
    Verification(String),

    #[error("internal invariant breached: {0}")]
    Internal(String),
}

impl Error {
    pub fn precondition(
        rule: &'static str,
        elements: impl IntoIterator<Item = String>,
        message: impl Into<String>,
    ) -> Error {
        Error::Precondition {
            rule,
            elements: elements.into_iter().collect(),
            message: message.into(),
        }
    }

    /// Stable rule identifier for diagnostics and tests.
    pub fn rule(&self) -> &'static str {
        match self {
            Error::Invalid(d) => d.0.first().map(|d| d.rule).unwrap_or("invalid"),
            Error::UnknownVertex(_) => "unknown-vertex",
            Error::Disconnected => "disconnected",
            Error::NonIntegralMarking { .. } => "non-integral-marking",
            Error::ZeroIndex => "zero-index",
            Error::Precondition { rule, .. } => rule,
            Error::BoundExceeded { .. } => "bound-exceeded",
            Error::Verification(_) => "verification-failure",
            Error::Internal(_) => "internal",
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Invalid(_) => ErrorClass::Validation,
            Error::Verification(_) | Error::Internal(_) => ErrorClass::Internal,
            _ => ErrorClass::Precondition,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
