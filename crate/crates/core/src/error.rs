use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("vertex {vertex} out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("missing coupling for edge ({0}, {1})")]
    MissingCoupling(usize, usize),

    #[error("coupling on edge ({i}, {j}) is {value}, must exceed min(c_i, c_j) = {bound}")]
    NonStrictCoupling {
        i: usize,
        j: usize,
        value: String,
        bound: String,
    },

    #[error("instance has {n} variables, limit is {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("interpolation parameter s = {0} is outside [0, 1]")]
    ParameterOutOfRange(f64),

    #[error("eigensolver did not converge at s = {s} (best residuals {residuals:?})")]
    NoConvergence { s: f64, residuals: Vec<f64> },

    #[error("degenerate spectrum: {0}")]
    Degenerate(String),

    #[error("zero energy denominator when flipping bit {bit}")]
    ZeroDenominator { bit: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. } | Error::Degenerate(_) | Error::ZeroDenominator { .. }
        )
    }
}
