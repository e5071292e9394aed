use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("invalid instance: {0}")]
    Semantic(String),
    #[error("infeasible instance: {0}")]
    InfeasibleInstance(String),
    #[error("structurally invalid solution: {0}")]
    Structural(String),
    #[error("integrity check failed: {0}")]
    Integrity(String),
    #[error("repair failed: {0}")]
    RepairFailed(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
