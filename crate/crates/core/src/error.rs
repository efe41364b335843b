use thiserror::Error;

/// Errors raised by the inference engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("outcome y = {y} is outside the domain of u(theta = {theta}, s = {s}): y - s must be positive")]
    Domain { theta: f64, s: f64, y: f64 },

    #[error("sample {sample}, observation {index}: y = {y} is outside the domain of u(theta = {theta}, s = {s}): y - s must be positive")]
    SampleDomain {
        sample: char,
        index: usize,
        y: f64,
        theta: f64,
        s: f64,
    },

    #[error("invalid utility parameters: {0}")]
    InvalidParams(String),

    #[error("empty grid: {0}")]
    EmptyGrid(String),

    #[error("length mismatch: expected {expected} values, got {actual} ({what})")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("subset of grid points is empty")]
    EmptySubset,

    #[error("critical values missing for {0}")]
    MissingQuantile(&'static str),

    #[error("quadrature did not converge: estimate {estimate}, error estimate {error} after {intervals} subintervals")]
    NonConvergence {
        estimate: f64,
        error: f64,
        intervals: usize,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
