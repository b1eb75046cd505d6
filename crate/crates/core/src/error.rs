use thiserror::Error;

/// Every failure the engine can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("size error: need 1 <= n and m <= n, got n={n}, m={m}")]
    Size { n: usize, m: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("ice rule violated at row {row}, column {col}")]
    IceRuleViolation { row: usize, col: usize },

    #[error("forbidden turn (Left, Left) in double row {double_row}")]
    ForbiddenTurn { double_row: usize },

    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse {
        line: usize,
        col: usize,
        msg: String,
    },

    #[error("pole: {factor} vanishes")]
    Pole { factor: String },

    #[error("non-integer result {value} for N_{k}(n={n}, m={m})")]
    NonIntegerResult {
        n: usize,
        m: usize,
        k: usize,
        value: String,
    },

    #[error("quadrature failure on [{a}, {b}]: error estimate {estimate:e} above tolerance")]
    QuadratureFailure { a: f64, b: f64, estimate: f64 },

    #[error("inconsistent matrix: {0}")]
    InconsistentMatrix(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn pole(factor: impl Into<String>) -> Error {
    Error::Pole {
        factor: factor.into(),
    }
}
