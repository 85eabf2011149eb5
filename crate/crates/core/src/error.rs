use thiserror::Error;

pub type Result<T> = std::result::Result<T, HarpError>;

#[derive(Debug, Error)]
pub enum HarpError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown node id `{0}`")]
    UnknownNode(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shape mismatch: expected {expected}, got {actual}")]
    ShapeMismatch { expected: String, actual: String },

    #[error("graph has no edges")]
    EdgelessGraph,

    #[error("too few labeled nodes ({0}) for a non-empty train/test split")]
    TooFewLabeled(usize),

    #[error("non-finite gradient during training (learning rate {lr}); training diverged")]
    Divergence { lr: f64 },

    #[error("non-finite feature value in row {0}")]
    NonFiniteFeature(usize),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl HarpError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        HarpError::InvalidParameter(msg.into())
    }

    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        HarpError::Parse {
            line,
            message: msg.into(),
        }
    }

    /// Short machine-readable error kind, used by the CLI.
    pub fn kind(&self) -> &'static str {
        match self {
            HarpError::Parse { .. } => "parse",
            HarpError::UnknownNode(_) => "unknown_node",
            HarpError::InvalidParameter(_) => "invalid_parameter",
            HarpError::ShapeMismatch { .. } => "shape_mismatch",
            HarpError::EdgelessGraph => "edgeless_graph",
            HarpError::TooFewLabeled(_) => "too_few_labeled",
            HarpError::Divergence { .. } => "divergence",
            HarpError::NonFiniteFeature(_) => "non_finite_feature",
            HarpError::Io(_) => "io",
        }
    }
}
