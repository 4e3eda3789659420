use thiserror::Error;

/// Errors surfaced by every operation in the crate.
///
/// Budget exhaustion is always reported as [`LabError::ResourceLimit`] and
/// never turned into a verdict.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("resource limit exceeded: {what} (limit {limit}, progress {progress})")]
    ResourceLimit { what: String, limit: u64, progress: u64 },

    #[error("precondition violated: {}", .0.join("; "))]
    Precondition(Vec<String>),

    #[error("internal inconsistency: {message}")]
    InternalInconsistency { message: String, state: String },

    #[error("stage `{stage}` failed: {reason}")]
    StageFailed { stage: String, reason: String },

    #[error("no acceptable colouring exists; instance reported as counterexample candidate")]
    CounterexampleCandidate { state: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl LabError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        LabError::InvalidArgument(msg.into())
    }

    pub(crate) fn limit(what: impl Into<String>, limit: u64, progress: u64) -> Self {
        LabError::ResourceLimit {
            what: what.into(),
            limit,
            progress,
        }
    }
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
