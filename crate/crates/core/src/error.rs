use thiserror::Error;

/// Errors produced by the flop calculus.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlopError {
    #[error("invalid diagram spec {spec:?}: {reason}")]
    Parse { spec: String, reason: String },

    #[error("node {0} is not a node of the diagram")]
    UnknownNode(usize),

    #[error("curve {0} is not an exceptional curve of the current subset")]
    InvalidCurve(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{0} is not a positive root")]
    NotARoot(String),

    #[error("root {0} restricts to zero")]
    ZeroRestriction(String),

    #[error("coset condition W_I x = x W_K fails: {0}")]
    CosetInconsistency(String),

    #[error("chamber enumeration exceeded the limit of {limit} chambers")]
    ChamberLimit { limit: usize },

    #[error("non-composable flop chain at step {step}")]
    NonComposable { step: usize },

    #[error("pole: q^beta = 1 for class {class}")]
    Pole { class: String },

    #[error("the zero class has no Gromov-Witten number")]
    ZeroClass,

    #[error("Novikov coordinate {index} is zero")]
    ZeroCoordinate { index: usize },

    #[error("unsupported rank {rank}: {what} needs {needed} exceptional curves")]
    UnsupportedRank {
        rank: usize,
        needed: &'static str,
        what: &'static str,
    },

    #[error("invalid GV table: {0}")]
    InvalidTable(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl FlopError {
    /// Short machine-readable tag used in JSON error output.
    pub fn kind(&self) -> &'static str {
        match self {
            FlopError::Parse { .. } => "parse",
            FlopError::UnknownNode(_) => "unknown_node",
            FlopError::InvalidCurve(_) => "invalid_curve",
            FlopError::DimensionMismatch { .. } => "dimension_mismatch",
            FlopError::NotARoot(_) => "not_a_root",
            FlopError::ZeroRestriction(_) => "zero_restriction",
            FlopError::CosetInconsistency(_) => "coset_inconsistency",
            FlopError::ChamberLimit { .. } => "chamber_limit",
            FlopError::NonComposable { .. } => "non_composable",
            FlopError::Pole { .. } => "pole",
            FlopError::ZeroClass => "zero_class",
            FlopError::ZeroCoordinate { .. } => "zero_coordinate",
            FlopError::UnsupportedRank { .. } => "unsupported_rank",
            FlopError::InvalidTable(_) => "invalid_table",
            FlopError::InvalidInput(_) => "invalid_input",
        }
    }
}

pub type Result<T> = std::result::Result<T, FlopError>;
