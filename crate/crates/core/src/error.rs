use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller supplied an invalid argument or mismatched shapes.
    #[error("invalid argument: {0}")]
    Argument(String),
    /// Point outside the closed unit disk.
    #[error("point ({0}, {1}) lies outside the unit disk")]
    Domain(f64, f64),
    /// An iterative kernel failed or a quantity degenerated.
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
