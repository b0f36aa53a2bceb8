use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("mode error: {0}")]
    Mode(String),

    #[error("pole: {0}")]
    Pole(String),

    #[error("bases are not congruent modulo 1: {0} and {1}")]
    Congruence(String, String),

    #[error("window too short: {what} needs at least {needed} points, got {got}")]
    WindowTooShort { what: String, needed: usize, got: usize },

    #[error("point {0} is outside the valid window {1}")]
    OutsideWindow(String, String),

    #[error("comparison window is empty for {0}")]
    EmptyWindow(String),

    #[error("unknown check id `{0}`")]
    UnknownCheck(String),

    #[error("unknown operator `{0}`")]
    UnknownOperator(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("singular implicit step at k={k}: 1 - lambda = 0")]
    Singular { k: usize },

    #[error("implicit solve did not converge at k={k} after {iterations} iterations (last iterate {last})")]
    NonConvergence { k: usize, iterations: usize, last: f64 },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
