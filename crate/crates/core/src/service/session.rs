use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use parking_lot::Mutex;
use rand::RngCore;
use serde::Serialize;

use crate::clock::Timestamp;
use crate::kb::Snapshot;
use crate::logic::{Solutions, Term};

use super::error::ServiceError;
use super::fsm::{self, Action, FsmState};
use super::stream::{StreamShared, StreamStatus};

/// A transition the session went through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Step {
    pub from: FsmState,
    pub action: Action,
    pub to: FsmState,
}

const HISTORY: usize = 64;

#[derive(Debug)]
pub(crate) struct Session {
    pub id: String,
    pub owner: String,
    pub state: FsmState,
    pub goal: Option<Term>,
    pub cursor: Option<Solutions>,
    pub snapshot: Option<Snapshot>,
    pub stream: Option<Arc<StreamShared>>,
    pub created: Timestamp,
    pub last_used: Timestamp,
    pub history: VecDeque<Step>,
}

impl Session {
    fn new(id: String, owner: String, now: Timestamp) -> Self {
        Session {
            id,
            owner,
            state: FsmState::Ready,
            goal: None,
            cursor: None,
            snapshot: None,
            stream: None,
            created: now,
            last_used: now,
            history: VecDeque::new(),
        }
    }

    /// Applies one FSM action or reports it as illegal, leaving the state unchanged.
    pub fn step(&mut self, action: Action) -> Result<(), ServiceError> {
        let to = fsm::step(self.state, action)?;
        if self.history.len() == HISTORY {
            self.history.pop_front();
        }
        self.history.push_back(Step { from: self.state, action, to });
        self.state = to;
        Ok(())
    }

    /// Drops the cursor and the snapshot it is pinned to.
    pub fn clear_resolution(&mut self) {
        self.cursor = None;
        self.snapshot = None;
    }

    /// Stops a running or paused stream; a running one suspends the session.
    pub fn stop_stream(&mut self) {
        if let Some(stream) = self.stream.take() {
            stream.set_status(StreamStatus::Closed);
        }
        if self.state == FsmState::Run {
            self.step(Action::Suspend).expect("run can always be suspended");
        }
    }

    pub fn info(&self) -> SessionInfo {
        SessionInfo {
            id: self.id.clone(),
            state: self.state,
            goal: self.goal.as_ref().map(ToString::to_string),
            stream: self.stream.as_ref().map(|s| s.status()),
            created: self.created,
            last_used: self.last_used,
            history: self.history.iter().copied().collect(),
        }
    }
}

/// Read-only view of a session.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionInfo {
    pub id: String,
    pub state: FsmState,
    pub goal: Option<String>,
    pub stream: Option<StreamStatus>,
    pub created: Timestamp,
    pub last_used: Timestamp,
    pub history: Vec<Step>,
}

pub(crate) type SessionRef = Arc<Mutex<Session>>;

/// Live sessions plus a bounded memory of why recent ones went away.
#[derive(Debug)]
pub(crate) struct Registry {
    live: HashMap<String, SessionRef>,
    gone: HashMap<String, String>,
    gone_order: VecDeque<String>,
    capacity: usize,
}

impl Registry {
    pub fn new(capacity: usize) -> Self {
        Registry { live: HashMap::new(), gone: HashMap::new(), gone_order: VecDeque::new(), capacity }
    }

    pub fn open(&mut self, owner: &str, now: Timestamp) -> SessionRef {
        let mut bytes = [0u8; 16];
        rand::thread_rng().fill_bytes(&mut bytes);
        let id = hex::encode(bytes);
        let session = Arc::new(Mutex::new(Session::new(id.clone(), owner.to_string(), now)));
        self.live.insert(id, session.clone());
        session
    }

    pub fn get(&self, id: &str) -> Result<SessionRef, ServiceError> {
        self.live.get(id).cloned().ok_or_else(|| ServiceError::SessionNotFound { notice: self.gone.get(id).cloned() })
    }

    pub fn remove(&mut self, id: &str, notice: impl Into<String>) {
        if self.live.remove(id).is_some() {
            if self.gone_order.len() == self.capacity {
                if let Some(old) = self.gone_order.pop_front() {
                    self.gone.remove(&old);
                }
            }
            self.gone.insert(id.to_string(), notice.into());
            self.gone_order.push_back(id.to_string());
        }
    }

    pub fn all(&self) -> Vec<SessionRef> {
        self.live.values().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.live.len()
    }
}
