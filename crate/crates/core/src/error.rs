use thiserror::Error;

/// Errors raised by the spectral operators, estimate checks and solver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("component mismatch: expected {expected} components, found {found}")]
    ComponentMismatch { expected: usize, found: usize },

    #[error("singular symbol at the zero mode (gamma = {gamma}) with nonzero mean amplitude")]
    SingularZeroMode { gamma: f64 },

    #[error("unknown g family `{0}`")]
    UnknownFamily(String),

    #[error("g family `{family}` rejected: {reason}")]
    InvalidFamily { family: String, reason: String },

    #[error("derivative evaluation failed: {0}")]
    Derivative(String),

    #[error("block index {j} out of range 0..={j_max}")]
    BlockOutOfRange { j: i32, j_max: usize },

    #[error("partition of unity residual {0:e} exceeds 1e-12")]
    PartitionOfUnity(f64),

    #[error("invalid Holder split: {0}")]
    HolderSplit(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("degenerate fit: {usable} usable samples (need at least {needed})")]
    DegenerateFit { usable: usize, needed: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("checkpoint format: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }
}
