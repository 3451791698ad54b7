use crate::kb::KbError;

use super::fsm::{Action, FsmState};
use super::request::Answer;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ServiceError {
    #[error("configurator rights required")]
    Unauthorized,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("goal {0} is not permitted")]
    GoalNotPermitted(String),
    #[error("stateless interaction is disabled")]
    StatelessDisabled,
    #[error("stateful interaction is disabled")]
    StatefulDisabled,
    #[error("goal index {index} out of range 1..={len}")]
    IndexOutOfRange { index: i64, len: usize },
    #[error("no goal selected")]
    NoGoalSelected,
    #[error("a timestamp can only be given for a dynamic knowledge base")]
    TimestampRejected,
    #[error("resolution deadline exceeded after {} solution(s)", partial.len())]
    DeadlineExceeded { partial: Vec<Answer> },
    #[error("session not found{}", notice.as_deref().map(|n| format!(" ({n})")).unwrap_or_default())]
    SessionNotFound { notice: Option<String> },
    #[error("illegal transition: {action:?} in state {state:?}")]
    IllegalTransition { state: FsmState, action: Action },
    #[error(transparent)]
    Kb(#[from] KbError),
    #[error("failed to persist state: {0}")]
    Persistence(String),
}

impl ServiceError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::Unauthorized => "Unauthorized",
            ServiceError::InvalidConfig(_) => "InvalidConfig",
            ServiceError::Syntax(_) => "SyntaxError",
            ServiceError::InvalidRequest(_) => "InvalidRequest",
            ServiceError::GoalNotPermitted(_) => "GoalNotPermitted",
            ServiceError::StatelessDisabled => "StatelessDisabled",
            ServiceError::StatefulDisabled => "StatefulDisabled",
            ServiceError::IndexOutOfRange { .. } => "IndexOutOfRange",
            ServiceError::NoGoalSelected => "NoGoalSelected",
            ServiceError::TimestampRejected => "TimestampRejected",
            ServiceError::DeadlineExceeded { .. } => "DeadlineExceeded",
            ServiceError::SessionNotFound { .. } => "SessionNotFound",
            ServiceError::IllegalTransition { .. } => "IllegalTransition",
            ServiceError::Kb(KbError::StaticKb) => "StaticKB",
            ServiceError::Kb(KbError::NonFact) => "NonFact",
            ServiceError::Kb(KbError::InvalidLease) => "InvalidLease",
            ServiceError::Persistence(_) => "PersistenceError",
        }
    }
}
