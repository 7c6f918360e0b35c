use thiserror::Error;

/// Errors raised while building models or running engines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("state budget of {budget} exceeded")]
    BudgetExceeded { budget: usize },

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("unknown event `{0}`")]
    UnknownEvent(String),

    #[error("malformed model: {0}")]
    Malformed(String),

    #[error("standing assumption violated: {0}")]
    Assumption(String),

    #[error("engine `{engine}` does not implement `{property}`")]
    Unsupported {
        engine: &'static str,
        property: &'static str,
    },

    #[error("event `{0}` is shared by several modules but unobservable")]
    SharedUnobservable(String),

    #[error("invalid Turing machine: {0}")]
    InvalidMachine(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn malformed(msg: impl Into<String>) -> Error {
    Error::Malformed(msg.into())
}
