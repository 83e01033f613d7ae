use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors produced anywhere in the simulation stack.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum Error {
    #[error("total Hilbert-space dimension {requested} exceeds the cap of {cap}")]
    DimensionCap { requested: usize, cap: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("mode index {index} out of range for a space of {modes} modes")]
    ModeIndex { index: usize, modes: usize },
    #[error("mode index {0} listed more than once")]
    DuplicateMode(usize),
    #[error("parameter `{name}` = {value} is outside its valid range {range}")]
    Parameter {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("truncation of {dim} levels is too small: {reason}")]
    Truncation { dim: usize, reason: String },
    #[error("numerical tolerance violated: {0}")]
    Tolerance(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("calibration infeasible: {0}")]
    Infeasible(String),
}

/// Coarse classification used to map errors onto process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Infeasible,
    Numerical,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_) | Error::Parameter { .. } => ErrorKind::Config,
            Error::Infeasible(_) => ErrorKind::Infeasible,
            _ => ErrorKind::Numerical,
        }
    }

    pub(crate) fn param(name: &'static str, value: f64, range: &'static str) -> Self {
        Error::Parameter { name, value, range }
    }
}
