use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{line}:{column}: syntax error: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("arity mismatch: {0}")]
    ArityMismatch(String),

    #[error("constant {0} lies outside the admissible exponent window [-1, 1]")]
    ConstantOutsideWindow(String),

    #[error("unknown function or relation `{0}`")]
    UnknownSymbol(String),

    #[error("value {0} is not finite (negative exponent present)")]
    UnboundedValue(String),

    #[error("more than one guard of `{0}` holds at the same point")]
    MultipleGuards(String),

    #[error("guards of `{name}` overlap: pieces {first} and {second}")]
    OverlappingGuards {
        name: String,
        first: usize,
        second: usize,
    },

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("relation `{relation}` is not closed under max: {detail}")]
    NotMaxClosed { relation: String, detail: String },

    #[error("cost function `{function}` is not submodular on the grid: {detail}")]
    SubmodularityViolation { function: String, detail: String },

    #[error("constant {0} is not rational; this solver accepts rational constants only")]
    NonRationalConstant(String),

    #[error("oracle mismatch: {0}")]
    OracleMismatch(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    /// True for errors that indicate a bug or breached invariant rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::OracleMismatch(_) | Error::Invariant(_) | Error::MultipleGuards(_)
        )
    }
}
