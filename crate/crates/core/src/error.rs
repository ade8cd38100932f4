use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A precondition on the input was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A hard cap (horizon, expansion size, automaton size) was exceeded.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// An enclosure straddles the value a certificate needs to exclude.
    #[error("inconclusive: {0}")]
    Inconclusive(String),

    /// A computed quantity contradicts a property it must satisfy.
    #[error("consistency failure: {0}")]
    Consistency(String),

    #[error("conditioning on a zero-probability word {0:?}")]
    ZeroProbability(String),

    #[error("malformed spec {spec:?}: {reason}")]
    Parse { spec: String, reason: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }

    pub(crate) fn parse(spec: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            spec: spec.to_string(),
            reason: reason.into(),
        }
    }
}
