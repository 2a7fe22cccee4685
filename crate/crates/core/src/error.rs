use thiserror::Error;

/// Location-annotated syntax error from one of the text formats.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} supports at most {cap} variables, got {n}")]
    CapExceeded {
        what: &'static str,
        n: usize,
        cap: usize,
    },
    #[error("expected a point with {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("variable x{} out of range for {n} variables", .var + 1)]
    VariableOutOfRange { var: usize, n: usize },
    #[error("parity query needs two distinct variables, got x{} twice", .0 + 1)]
    RepeatedVariable(usize),
    #[error("truth table for {n} variables needs {expected} bits, got {got}")]
    TableSize {
        n: usize,
        expected: usize,
        got: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("phi is not a permutation: entry {0} is repeated or out of range")]
    InvalidPermutation(usize),
    #[error("bent functions need an even variable count, got {0}")]
    OddVariableCount(usize),
    #[error("tree precondition violated: {0}")]
    TreeShape(String),
    #[error("certificate rejected: {0}")]
    InvalidCertificate(String),
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_cap(what: &'static str, n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::CapExceeded { what, n, cap })
    } else {
        Ok(())
    }
}
