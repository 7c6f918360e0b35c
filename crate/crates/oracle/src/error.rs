use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("oracle state budget of {budget} exceeded")]
    Budget { budget: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Core(#[from] desmod_core::Error),
}

pub type Result<T> = std::result::Result<T, OracleError>;
