use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Library-wide error type. CLI exit codes are derived from the variant.
#[derive(Debug, Error)]
pub enum Error {
    #[error("fluidity must be strictly positive and finite, got {0}")]
    InvalidFluidity(f64),

    #[error("junction position set is empty")]
    NoJunction,

    #[error("state out of grid bounds on axis {axis}: value {value} not in [{lo}, {hi}]")]
    OutOfBounds {
        axis: String,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("operation requires {required} mode but scenario declares {actual}")]
    ModeMismatch { required: String, actual: String },

    #[error("unsupported relation representation: {0}")]
    UnsupportedRepresentation(String),

    #[error("state is not in the transport kernel")]
    NotInKernel,

    #[error("budget exceeded: {what} needs {needed} but budget is {budget}")]
    BudgetExceeded {
        what: String,
        needed: u64,
        budget: u64,
    },

    #[error("synthesis failed: {reason} ({steps} steps completed)")]
    SynthesisFailure { reason: String, steps: usize },

    #[error("evolution has not passed verification: {0}")]
    NotVerified(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("scenario validation failed:\n{}", .0.join("\n"))]
    ScenarioInvalid(Vec<String>),

    #[error("bad file format: {0}")]
    BadFileFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 usage, 3 validation, 4 budget,
    /// 5 hard diff failure (raised by the diff command itself).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BudgetExceeded { .. } => 4,
            Error::Io(_) => 2,
            _ => 3,
        }
    }
}
