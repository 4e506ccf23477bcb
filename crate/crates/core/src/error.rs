use thiserror::Error;

/// Errors raised by surface construction, evaluation and minimization.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PcurvError {
    /// det g fell to or below the immersion threshold.
    #[error("degenerate jet at node {node:?}: det g = {detg:e}")]
    DegenerateJet { node: Option<usize>, detg: f64 },

    #[error("stencil for node {node} leaves the domain")]
    StencilOutOfDomain { node: usize },

    #[error("neck matching failed for eps = {eps}: {reason}")]
    MatchingFailed { eps: f64, reason: String },

    #[error("perturbation stayed degenerate after {halvings} amplitude halvings")]
    PerturbationDegenerate { halvings: u32 },

    #[error("operation requires a closed surface")]
    NotClosed,

    #[error("shape mismatch: expected {expected} entries, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    /// Backtracking shrank the step below the floor; the descent path left the immersion set.
    #[error("line search collapsed at iteration {iteration} (step {step:e})")]
    DegenerateStep { iteration: usize, step: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for PcurvError {
    fn from(e: std::io::Error) -> Self {
        PcurvError::Io(e.to_string())
    }
}

impl PcurvError {
    pub(crate) fn at_node(self, node: usize) -> Self {
        match self {
            PcurvError::DegenerateJet { detg, .. } => PcurvError::DegenerateJet { node: Some(node), detg },
            other => other,
        }
    }

    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        !matches!(self, PcurvError::InvalidParameter(_) | PcurvError::ShapeMismatch { .. } | PcurvError::Io(_))
    }
}

pub type Result<T> = std::result::Result<T, PcurvError>;

pub(crate) fn invalid(msg: impl Into<String>) -> PcurvError {
    PcurvError::InvalidParameter(msg.into())
}
