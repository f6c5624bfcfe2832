use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Shapes, slot kinds or grids that do not fit the operation.
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical abort: {0}")]
    Numerical(String),
    #[error("precondition `{what}` violated, residual {residual:.3e}")]
    Precondition { what: String, residual: f64 },
    #[error("projection stalled at residual {residual:.3e} after {iterations} iterations")]
    Projection { residual: f64, iterations: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn contract<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Contract(msg.into()))
}
