//! Session state machine.
//!
//! ```text
//!            setGoal
//!            ┌──┐
//!            ▼  │        query
//!   start ─► Ready ──────────────► Run
//!            │  ▲                 │  ▲
//!      close │  │ reset   suspend │  │ query / resume
//!            │  │                 ▼  │
//!            │  └──────────────── Pause
//!            ▼                     │
//!      NoGoalSelected ◄────────────┘ close
//! ```
//!
//! Any other (state, action) pair is illegal. Service operations that are
//! accepted in more states (for example `reset` while a stream runs) are
//! carried out as a sequence of legal steps.

use serde::{Deserialize, Serialize};

use super::error::ServiceError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum FsmState {
    Ready,
    Run,
    Pause,
    NoGoalSelected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Action {
    SetGoal,
    Query,
    Suspend,
    Resume,
    Reset,
    Close,
}

impl FsmState {
    pub const ALL: [FsmState; 4] = [FsmState::Ready, FsmState::Run, FsmState::Pause, FsmState::NoGoalSelected];
}

impl Action {
    pub const ALL: [Action; 6] =
        [Action::SetGoal, Action::Query, Action::Suspend, Action::Resume, Action::Reset, Action::Close];
}

/// The successor state, or `None` when the pair is illegal.
pub fn transition(state: FsmState, action: Action) -> Option<FsmState> {
    use Action::*;
    use FsmState::*;
    match (state, action) {
        (Ready, SetGoal) => Some(Ready),
        (Ready, Query) => Some(Run),
        (Ready, Close) => Some(NoGoalSelected),
        (Run, Suspend) => Some(Pause),
        (Pause, Query) | (Pause, Resume) => Some(Run),
        (Pause, Reset) => Some(Ready),
        (Pause, Close) => Some(NoGoalSelected),
        _ => None,
    }
}

/// `transition` as a checked step: illegal pairs are reported as errors.
pub fn step(state: FsmState, action: Action) -> Result<FsmState, ServiceError> {
    transition(state, action).ok_or(ServiceError::IllegalTransition { state, action })
}
