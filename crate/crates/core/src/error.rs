use thiserror::Error;

/// Errors raised by the constructions and their checks.
///
/// Variants fall into three groups that the command-line front end maps to
/// exit codes: malformed input ([`Error::Parse`]), a violated hypothesis of a
/// construction (most variants), and a rejected identity
/// ([`Error::Verification`], [`Error::Internal`]).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("negative entry at ({row}, {col}); a positive matrix is required")]
    NegativeEntry { row: usize, col: usize },

    #[error("C is not nilpotent")]
    NotNilpotent,

    #[error("support digraph has a cycle through index {0}; C is not triangularizable by a permutation")]
    Cycle(usize),

    #[error("C is not {k}-super upper-triangular: nonzero entry at ({row}, {col})")]
    NotSuperTriangular { k: usize, row: usize, col: usize },

    #[error("zero weight on active row {0}")]
    ZeroWeight(usize),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("support of C reaches block ({row}, {col}); the truncation window needs blocks below {limit}")]
    SupportTooWide { row: usize, col: usize, limit: usize },

    #[error("truncation too small: the schedule needs a block count of at least {required}, got {count}")]
    TruncationTooSmall { required: usize, count: usize },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
