use num_bigint::BigUint;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("horizon must have at least 2 slots, got {0}")]
    InvalidHorizon(usize),

    #[error("appliance `{name}`: {reason}")]
    InvalidAppliance { name: String, reason: String },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("infeasible flow configuration: {0}")]
    InfeasibleFlows(String),

    #[error("start slot {start} is not feasible for appliance {appliance}")]
    InfeasibleStart { appliance: usize, start: usize },

    #[error("flow row {row} is not integral")]
    NotIntegral { row: usize },

    #[error("total energy must be positive")]
    ZeroEnergy,

    #[error("relaxed problem is infeasible")]
    SolverInfeasible,

    #[error("solver failed: {0}")]
    NumericalFailure(String),

    #[error("successive relaxation did not terminate within {0} iterations")]
    IterationLimitExceeded(usize),

    #[error("enumeration too large: {size} schedules exceed the limit of {limit}")]
    TooLarge { size: BigUint, limit: u64 },

    #[error("empty appliance catalog")]
    EmptyCatalog,

    #[error("unknown catalog entry `{0}`")]
    UnknownCatalogEntry(String),

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{0}")]
    Io(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SolverInfeasible
            | Error::NumericalFailure(_)
            | Error::IterationLimitExceeded(_) => 2,
            Error::TooLarge { .. } => 3,
            _ => 1,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
