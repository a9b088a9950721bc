use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid mismatch: {0}")]
    GridMismatch(&'static str),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("field is not unit length: max deviation {max_dev:.3e} exceeds tolerance {tol:.3e}")]
    NotUnit { max_dev: f64, tol: f64 },

    #[error("conjugate gradient stalled after {iterations} iterations (relative residual {residual:.3e})")]
    SolverStalled { iterations: usize, residual: f64 },

    #[error("magnetization vanished at point {point} (cannot project)")]
    DegenerateState { point: usize },

    #[error("unknown initial condition '{0}'")]
    UnknownIc(String),

    #[error("unknown scheme '{0}'")]
    UnknownScheme(String),

    #[error("initial condition '{name}' is not defined for this grid: {reason}")]
    IcUnsupported { name: String, reason: String },

    #[error("config field '{field}': {message}")]
    Config { field: String, message: String },

    #[error("order fit needs positive errors (got {0})")]
    NonPositiveError(f64),

    #[error("order fit needs at least two ladder entries")]
    LadderTooShort,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed JSON config: {0}")]
    Json(#[from] serde_json::Error),

    #[error("malformed VTK file: {0}")]
    Vtk(String),
}

impl Error {
    pub fn config(field: &str, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
