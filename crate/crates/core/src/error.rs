use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("log map is ambiguous for antipodal points (distance {distance} = half perimeter)")]
    Antipodal { distance: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("grid error: {0}")]
    Grid(String),

    #[error("operator spec error: {0}")]
    Spec(String),

    #[error("linear solver error: {0}")]
    Solver(String),

    #[error("policy iteration did not converge after {iterations} iterations (residual history {history:?})")]
    Convergence {
        iterations: usize,
        history: Vec<f64>,
    },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
