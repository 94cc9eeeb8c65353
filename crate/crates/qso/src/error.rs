use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum QsoError {
    #[error("invalid distribution spec: {0}")]
    InvalidSpec(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("numeric failure: {context} (residual estimate {residual:e})")]
    NumericFailure { context: String, residual: f64 },

    #[error("no convergence within depth cap {depth_cap} (last increment {last_increment:e})")]
    NonConvergence { depth_cap: u32, last_increment: f64 },

    #[error("grid unusable for residual evaluation: {0}")]
    InvalidGrid(String),

    #[error("invalid population: {0}")]
    InvalidPopulation(String),

    #[error("infeasible request: {context} (estimated {estimated_draws} draws)")]
    Infeasible { context: String, estimated_draws: u128 },

    #[error("truncation budget inapplicable: {0}")]
    BudgetInapplicable(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, QsoError>;
