use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("singular state: a1 = {a1} at grid point ({i}, {j})")]
    SingularState { a1: f64, i: usize, j: usize },

    #[error("dimension mismatch: expected {expected:?}, got {got:?}")]
    DimensionMismatch { expected: (usize, usize), got: (usize, usize) },

    #[error("blow-up at t = {time:.6}: {reason}")]
    BlowUp { time: f64, reason: String },

    #[error("total variance is zero; sensitivity indices are undefined")]
    UndefinedSensitivity,

    #[error("point lies outside the parameter box (coordinate {coordinate}: {value})")]
    OutOfBox { coordinate: usize, value: f64 },

    #[error("{count} cubature node(s) failed to evaluate")]
    PoisonedNodes { count: usize, nodes: Vec<Vec<usize>> },

    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("parse error (line {line}): {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, message: msg.into() }
    }
}
