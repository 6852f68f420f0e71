use thiserror::Error;

/// Errors produced by the estimators, the risk engine and the Bayes witnesses.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("MLE solver did not converge after {iterations} iterations (residual {residual:e}, last iterate {last_iterate:?})")]
    SolverFailure {
        last_iterate: Vec<f64>,
        residual: f64,
        iterations: usize,
    },

    #[error("risk difference undefined: {0}")]
    UndefinedDifference(String),

    #[error("observed data has zero probability under every prior point")]
    ImpossibleData,

    #[error("every candidate has infinite posterior loss")]
    DegenerateLoss,
}

pub type Result<T> = std::result::Result<T, Error>;
