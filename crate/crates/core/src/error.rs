use thiserror::Error;

/// Errors surfaced by the symbolic engine.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("operands live over different variable tables")]
    TableMismatch,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("parity violation: {0}")]
    ParityViolation(String),
    #[error("element has zero body and is not invertible")]
    ZeroBody,
    #[error("denominator `{0}` contains odd or nilpotent variables")]
    BadDenominator(String),
    #[error("matrix shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("row or column index out of range")]
    IndexOutOfRange,
    #[error("matrix body is singular")]
    SingularBody,
    #[error("invalid flag type: {0}")]
    InvalidFlagType(String),
    #[error("singular transition from chart {from} to chart {to}")]
    SingularTransition { from: String, to: String },
    #[error("size mismatch between gl(m|n) elements")]
    SizeMismatch,
    #[error("operation requires a homogeneous element")]
    NotHomogeneous,
    #[error("weight is not dominant")]
    NotDominant,
    #[error("no table row matches (m, n, k1, l1) = ({0}, {1}, {2}, {3})")]
    NoTableRow(usize, usize, usize, usize),
    #[error("ambiguous table rows for (m, n, k1, l1) = ({0}, {1}, {2}, {3})")]
    AmbiguousTableRow(usize, usize, usize, usize),
    #[error("{0}")]
    Other(String),
}
