use thiserror::Error;

/// Errors produced by the numerical engine.
///
/// The variants are grouped by how a caller is expected to react: bad input
/// (`Domain`, `Parse`, `Unsupported`), numerical breakdown (`NonConvergence`,
/// `StepUnderflow`), structural failures of a transformation (`Degenerate`) and
/// bookkeeping mismatches (`Inconsistent`).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("integration step size underflow at x = {x}")]
    StepUnderflow { x: f64 },

    #[error("integration exceeded {steps} steps at x = {x}")]
    TooManySteps { x: f64, steps: usize },

    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("degenerate transformation at x = {x}: {reason}")]
    Degenerate { x: f64, reason: String },

    #[error("transformation chain failed at stage {stage}: {source}")]
    Stage {
        stage: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("inconsistent result: {0}")]
    Inconsistent(String),

    #[error("inconclusive fit: {0}")]
    InconclusiveFit(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn degenerate(x: f64, reason: impl Into<String>) -> Self {
        Error::Degenerate {
            x,
            reason: reason.into(),
        }
    }

    /// Strips any `Stage` wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for failures of the numerical machinery itself, as opposed to
    /// invalid input or a degenerate transformation.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self.root(),
            Error::StepUnderflow { .. } | Error::TooManySteps { .. } | Error::NonConvergence(_)
        )
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self.root(), Error::Degenerate { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
