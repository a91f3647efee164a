use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("infeasible instance: {0}")]
    Infeasible(String),
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("oracle budget exceeded: {what} is {actual}, limit {limit}")]
    OverBudget {
        what: &'static str,
        limit: usize,
        actual: usize,
    },
    #[error("solver failure: {0}")]
    Solver(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
