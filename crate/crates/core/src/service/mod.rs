//! The client and configurator interfaces over the engine and the temporal
//! knowledge base.
//!
//! A [`Service`] is cheap to clone and safe to share between threads.
//! Stateless requests only read immutable snapshots; session operations
//! serialise on their session.

mod config;
mod error;
pub mod fsm;
mod request;
mod session;
mod stream;

use std::sync::Arc;
use std::time::{Duration, Instant};

use parking_lot::RwLock;
use parking_lot::Mutex;

pub use config::{KbMode, PublicConfig, ServiceConfig, ServiceOptions, DEFAULT_DEADLINE_MS, DEFAULT_SESSION_TTL_MS};
pub use error::ServiceError;
pub use fsm::{step, transition, Action, FsmState};
pub use request::{Answer, Count, GoalSelector, Mode, SolveRequest};
pub use session::{SessionInfo, Step};
pub use stream::{StreamHandle, StreamStatus};

use crate::access::{Principal, Role, UserRecord};
use crate::clock::{Clock, SystemClock, Timestamp};
use crate::kb::{Origin, Snapshot, TemporalKb, TimedClause};
use crate::logic::{
    is_instance, parse_clause, parse_term, Clause, ResolutionLimits, SolveError, Solutions, Term, UnknownPolicy,
};
use crate::persistence::{PersistedState, Store, StoreError, StoredClause, FORMAT_VERSION};

use session::{Registry, Session, SessionRef};
use stream::{StreamShared, Tick};

#[derive(Debug)]
struct Inner {
    config: RwLock<ServiceConfig>,
    kb: TemporalKb,
    sessions: Mutex<Registry>,
    users: RwLock<Vec<UserRecord>>,
    clock: Arc<dyn Clock>,
    options: ServiceOptions,
    store: Option<Store>,
    startup_notice: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Service {
    inner: Arc<Inner>,
}

/// Assembles a [`Service`], restoring durable state when a store is given.
#[derive(Debug)]
pub struct ServiceBuilder {
    options: ServiceOptions,
    clock: Arc<dyn Clock>,
    store: Option<Store>,
    config: ServiceConfig,
    users: Vec<UserRecord>,
}

impl Default for ServiceBuilder {
    fn default() -> Self {
        ServiceBuilder {
            options: ServiceOptions::default(),
            clock: Arc::new(SystemClock),
            store: None,
            config: ServiceConfig::default(),
            users: Vec::new(),
        }
    }
}

impl ServiceBuilder {
    pub fn options(mut self, options: ServiceOptions) -> Self {
        self.options = options;
        self
    }

    pub fn clock(mut self, clock: Arc<dyn Clock>) -> Self {
        self.clock = clock;
        self
    }

    pub fn store(mut self, store: Store) -> Self {
        self.store = Some(store);
        self
    }

    /// Initial configuration when no stored state exists.
    pub fn config(mut self, config: ServiceConfig) -> Self {
        self.config = config;
        self
    }

    /// A user created at startup unless the store already has one by that name.
    pub fn user(mut self, user: UserRecord) -> Self {
        self.users.push(user);
        self
    }

    /// Fails only when the store cannot be read at all or has an unknown
    /// format version; a corrupt store is quarantined and reported through
    /// [`Service::startup_notice`].
    pub fn build(self) -> Result<Service, StoreError> {
        let ServiceBuilder { options, clock, store, mut config, users: bootstrap } = self;
        let mut notice = None;
        let loaded = match store.as_ref().map(Store::load).transpose() {
            Ok(state) => state.flatten(),
            Err(e @ StoreError::Corrupt { .. }) => {
                log::warn!("{e}; starting with defaults");
                notice = Some(e.to_string());
                None
            }
            Err(e) => return Err(e),
        };
        let mut users = Vec::new();
        let mut entries = Vec::new();
        if let Some(state) = loaded {
            let goals = state.goals.iter().filter_map(|g| restore(parse_term(g), g)).collect();
            config = ServiceConfig::with_public(state.config.into(), goals);
            entries = state
                .theory
                .iter()
                .filter_map(|c| {
                    restore(parse_clause(&c.clause), &c.clause).map(|clause| TimedClause {
                        clause: Arc::new(clause),
                        validity: c.validity,
                        origin: Origin::Configurator,
                    })
                })
                .collect();
            users = state.users;
        }
        let fresh_users = bootstrap.iter().any(|b| !users.iter().any(|u: &UserRecord| u.username == b.username));
        for b in bootstrap {
            if !users.iter().any(|u| u.username == b.username) {
                users.push(b);
            }
        }
        let kb = TemporalKb::from_entries(entries, config.kb_mode == KbMode::Dynamic);
        let service = Service {
            inner: Arc::new(Inner {
                config: RwLock::new(config),
                kb,
                sessions: Mutex::new(Registry::new(options.tombstones)),
                users: RwLock::new(users),
                clock,
                options,
                store,
                startup_notice: notice,
            }),
        };
        if fresh_users || service.inner.startup_notice.is_some() {
            service.persist().map_err(|e| StoreError::Io(std::io::Error::other(e.to_string())))?;
        }
        Ok(service)
    }
}

fn restore<T, E: std::fmt::Display>(parsed: Result<T, E>, text: &str) -> Option<T> {
    parsed.map_err(|e| log::error!("dropping unreadable stored entry {text:?}: {e}")).ok()
}

/// Configurator operations, obtained through [`Service::admin`].
#[derive(Debug, Clone, Copy)]
pub struct Admin<'a> {
    service: &'a Service,
}

impl Service {
    pub fn builder() -> ServiceBuilder {
        ServiceBuilder::default()
    }

    /// An in-memory service with default configuration.
    pub fn new() -> Self {
        Service::builder().build().expect("no store to load")
    }

    pub fn startup_notice(&self) -> Option<&str> {
        self.inner.startup_notice.as_deref()
    }

    pub fn now(&self) -> Timestamp {
        self.inner.clock.now()
    }

    pub fn options(&self) -> &ServiceOptions {
        &self.inner.options
    }

    /// Configurator interface; clients are refused.
    pub fn admin(&self, caller: &Principal) -> Result<Admin<'_>, ServiceError> {
        if caller.role.allows(Role::Configurator) {
            Ok(Admin { service: self })
        } else {
            Err(ServiceError::Unauthorized)
        }
    }

    pub fn authenticate(&self, username: &str, password: &str) -> Option<Principal> {
        let user = self.inner.users.read().iter().find(|u| u.username == username).cloned()?;
        user.verify(password).then(|| Principal::new(user.username, user.role))
    }

    // ----- client observation -----

    pub fn service_configuration(&self) -> PublicConfig {
        self.inner.config.read().public()
    }

    pub fn goals(&self) -> Vec<Term> {
        self.inner.config.read().goal_list.clone()
    }

    /// Whether `goal` is an instance of some whitelisted template.
    pub fn is_goal(&self, goal: &Term) -> bool {
        self.inner.config.read().goal_list.iter().any(|t| is_instance(goal, t))
    }

    /// Clauses valid at `at` (default: now). A timestamp is only accepted
    /// for a dynamic knowledge base.
    pub fn theory(&self, at: Option<Timestamp>) -> Result<Vec<TimedClause>, ServiceError> {
        if at.is_some() && self.inner.config.read().kb_mode == KbMode::Static {
            return Err(ServiceError::TimestampRejected);
        }
        Ok(self.inner.kb.get_theory(at.unwrap_or_else(|| self.now())))
    }

    // ----- stateless -----

    pub fn solve(&self, req: &SolveRequest) -> Result<Vec<Answer>, ServiceError> {
        let config = self.inner.config.read().clone();
        if !config.stateless_enabled {
            return Err(ServiceError::StatelessDisabled);
        }
        let (skip, count) = req.shape()?;
        if req.every_ms.is_some() {
            return Err(ServiceError::InvalidRequest("every is only available on sessions".into()));
        }
        let goal = req.goal.clone().ok_or_else(|| ServiceError::InvalidRequest("goal is required".into()))?;
        self.check_whitelisted(&goal)?;
        let at = self.resolve_at(req.at, config.kb_mode)?;
        let deadline = Instant::now() + Duration::from_millis(req.within_ms.unwrap_or(config.default_deadline_ms));
        let snapshot = self.inner.kb.snapshot_at(at);
        let mut cursor = self.cursor(&snapshot, goal, config.kb_mode);
        cursor.set_deadline(Some(deadline));
        collect(&mut cursor, skip, count)
    }

    // ----- stateful -----

    pub fn open_session(&self, caller: &Principal) -> Result<String, ServiceError> {
        if !self.inner.config.read().stateful_enabled {
            return Err(ServiceError::StatefulDisabled);
        }
        self.collect_expired();
        let session = self.inner.sessions.lock().open(&caller.name, self.now());
        let id = session.lock().id.clone();
        Ok(id)
    }

    pub fn session_info(&self, caller: &Principal, id: &str) -> Result<SessionInfo, ServiceError> {
        let session = self.session(caller, id)?;
        let info = session.lock().info();
        Ok(info)
    }

    pub fn set_goal(&self, caller: &Principal, id: &str, selector: &GoalSelector) -> Result<(), ServiceError> {
        self.require_stateful()?;
        let goal = {
            let config = self.inner.config.read();
            match selector {
                GoalSelector::Index(i) => {
                    let len = config.goal_list.len();
                    usize::try_from(*i)
                        .ok()
                        .filter(|&i| (1..=len).contains(&i))
                        .map(|i| config.goal_list[i - 1].clone())
                        .ok_or(ServiceError::IndexOutOfRange { index: *i, len })?
                }
                GoalSelector::Template(t) => {
                    if !config.goal_list.iter().any(|g| is_instance(t, g)) {
                        return Err(ServiceError::GoalNotPermitted(t.to_string()));
                    }
                    t.clone()
                }
            }
        };
        let session = self.session(caller, id)?;
        let mut s = session.lock();
        self.touch(&mut s);
        s.stop_stream();
        if s.state == FsmState::Pause {
            s.step(Action::Reset)?;
        }
        s.step(Action::SetGoal)?;
        s.goal = Some(goal);
        s.clear_resolution();
        Ok(())
    }

    /// Advances the session's cursor. The first call after `set_goal` or
    /// `reset` pins the snapshot.
    pub fn solve_session(&self, caller: &Principal, id: &str, req: &SolveRequest) -> Result<Vec<Answer>, ServiceError> {
        let config = self.require_stateful()?;
        let (_, count) = self.session_shape(req)?;
        if req.every_ms.is_some() {
            return Err(ServiceError::InvalidRequest("use a stream for every".into()));
        }
        let session = self.session(caller, id)?;
        let mut s = session.lock();
        self.touch(&mut s);
        let goal = self.session_goal(&s)?;
        if s.state != FsmState::Ready && s.state != FsmState::Pause {
            return Err(ServiceError::IllegalTransition { state: s.state, action: Action::Query });
        }
        if s.stream.is_some() {
            // a paused stream is replaced by request/response interaction
            s.stop_stream();
        }
        self.ensure_cursor(&mut s, goal, req.at, config.kb_mode)?;
        s.step(Action::Query)?;
        let deadline = Instant::now() + Duration::from_millis(req.within_ms.unwrap_or(config.default_deadline_ms));
        let cursor = s.cursor.as_mut().expect("cursor created above");
        cursor.set_deadline(Some(deadline));
        let result = collect(cursor, 0, count);
        s.step(Action::Suspend)?;
        result
    }

    /// Starts periodic delivery on the session. On a static knowledge base,
    /// or when `at` is given, deliveries continue the session's cursor and
    /// the stream ends when it is exhausted. Otherwise every delivery
    /// re-runs the goal on a snapshot taken at delivery time.
    pub fn stream(&self, caller: &Principal, id: &str, req: &SolveRequest) -> Result<StreamHandle, ServiceError> {
        let config = self.require_stateful()?;
        let (_, count) = self.session_shape(req)?;
        let every = req.every_ms.ok_or_else(|| ServiceError::InvalidRequest("everyMs is required".into()))?;
        let session = self.session(caller, id)?;
        let mut s = session.lock();
        self.touch(&mut s);
        let goal = self.session_goal(&s)?;
        if s.state != FsmState::Ready && s.state != FsmState::Pause {
            return Err(ServiceError::IllegalTransition { state: s.state, action: Action::Query });
        }
        let at = self.resolve_at(req.at, config.kb_mode)?;
        let pinned = config.kb_mode == KbMode::Static || req.at.is_some();
        if pinned {
            self.ensure_cursor(&mut s, goal.clone(), req.at.is_some().then_some(at), config.kb_mode)?;
        }
        s.stop_stream();
        s.step(Action::Query)?;
        let shared = Arc::new(StreamShared::new(Duration::from_millis(every), count, pinned));
        s.stream = Some(shared.clone());
        Ok(StreamHandle { service: self.clone(), session: session.clone(), shared, session_id: s.id.clone(), goal })
    }

    /// Suspends a running stream.
    pub fn pause(&self, caller: &Principal, id: &str) -> Result<(), ServiceError> {
        let session = self.session(caller, id)?;
        let mut s = session.lock();
        self.touch(&mut s);
        s.step(Action::Suspend)?;
        if let Some(stream) = &s.stream {
            stream.set_status(StreamStatus::Paused);
        }
        Ok(())
    }

    /// Continues a paused stream; there is nothing to resume otherwise.
    pub fn resume(&self, caller: &Principal, id: &str) -> Result<(), ServiceError> {
        let session = self.session(caller, id)?;
        let mut s = session.lock();
        self.touch(&mut s);
        let paused = s.stream.as_ref().is_some_and(|st| st.status() == StreamStatus::Paused);
        if s.state != FsmState::Pause || !paused {
            return Err(ServiceError::IllegalTransition { state: s.state, action: Action::Resume });
        }
        s.step(Action::Resume)?;
        s.stream.as_ref().expect("checked above").set_status(StreamStatus::Active);
        Ok(())
    }

    /// Restarts the resolution of the selected goal. Accepted in every live
    /// state: a running stream is suspended first, and in `Ready` there is
    /// nothing to reset.
    pub fn reset(&self, caller: &Principal, id: &str) -> Result<(), ServiceError> {
        let session = self.session(caller, id)?;
        let mut s = session.lock();
        self.touch(&mut s);
        s.stop_stream();
        if s.state == FsmState::Pause {
            s.step(Action::Reset)?;
        }
        s.clear_resolution();
        Ok(())
    }

    /// Ends the session for good.
    pub fn close(&self, caller: &Principal, id: &str) -> Result<(), ServiceError> {
        let session = self.session(caller, id)?;
        let mut s = session.lock();
        s.stop_stream();
        s.step(Action::Close)?;
        s.clear_resolution();
        self.inner.sessions.lock().remove(id, "closed by client");
        Ok(())
    }

    /// Removes sessions idle for longer than the configured TTL.
    pub fn collect_expired(&self) -> usize {
        let now = self.now();
        let ttl = self.inner.options.session_ttl_ms;
        let expired: Vec<SessionRef> = self
            .inner
            .sessions
            .lock()
            .all()
            .into_iter()
            .filter(|s| s.try_lock().is_some_and(|s| now.millis().saturating_sub(s.last_used.millis()) > ttl))
            .collect();
        for s in &expired {
            self.end_session(s, "expired after inactivity");
        }
        expired.len()
    }

    pub fn session_count(&self) -> usize {
        self.inner.sessions.lock().len()
    }

    /// Ends every running or paused stream; sessions stay open.
    pub fn stop_streams(&self) {
        let all = self.inner.sessions.lock().all();
        for s in &all {
            s.lock().stop_stream();
        }
    }

    // ----- sensor -----

    pub fn ingest_fact(&self, fact: Clause, lease_ms: Option<u64>) -> Result<(), ServiceError> {
        Ok(self.inner.kb.ingest_fact(fact, lease_ms, self.now())?)
    }

    // ----- internals -----

    fn require_stateful(&self) -> Result<ServiceConfig, ServiceError> {
        let config = self.inner.config.read().clone();
        if config.stateful_enabled {
            Ok(config)
        } else {
            Err(ServiceError::StatefulDisabled)
        }
    }

    fn session_shape(&self, req: &SolveRequest) -> Result<(usize, Count), ServiceError> {
        let shape = req.shape()?;
        if req.after_n.is_some() || req.mode == Mode::After {
            return Err(ServiceError::InvalidRequest("afterN is only available for stateless requests".into()));
        }
        if req.goal.is_some() {
            return Err(ServiceError::InvalidRequest("a session solves its selected goal; use setGoal".into()));
        }
        Ok(shape)
    }

    fn check_whitelisted(&self, goal: &Term) -> Result<(), ServiceError> {
        if self.is_goal(goal) {
            Ok(())
        } else {
            Err(ServiceError::GoalNotPermitted(goal.to_string()))
        }
    }

    fn session_goal(&self, s: &Session) -> Result<Term, ServiceError> {
        let goal = s.goal.clone().ok_or(ServiceError::NoGoalSelected)?;
        // the whitelist may have changed since the goal was selected
        self.check_whitelisted(&goal)?;
        Ok(goal)
    }

    fn resolve_at(&self, at: Option<Timestamp>, mode: KbMode) -> Result<Timestamp, ServiceError> {
        match (at, mode) {
            (Some(_), KbMode::Static) => Err(ServiceError::TimestampRejected),
            (Some(at), KbMode::Dynamic) => Ok(at),
            (None, _) => Ok(self.now()),
        }
    }

    fn cursor(&self, snapshot: &Snapshot, goal: Term, mode: KbMode) -> Solutions {
        let limits = ResolutionLimits { max_depth: self.inner.options.max_depth, deadline: None };
        let unknown = match mode {
            KbMode::Static => UnknownPolicy::Error,
            KbMode::Dynamic => UnknownPolicy::Fail,
        };
        Solutions::new(snapshot.theory().clone(), goal, limits, unknown)
    }

    fn ensure_cursor(&self, s: &mut Session, goal: Term, at: Option<Timestamp>, mode: KbMode) -> Result<(), ServiceError> {
        if s.cursor.is_none() {
            let at = self.resolve_at(at, mode)?;
            let snapshot = self.inner.kb.snapshot_at(at);
            s.cursor = Some(self.cursor(&snapshot, goal, mode));
            s.snapshot = Some(snapshot);
        }
        Ok(())
    }

    fn session(&self, caller: &Principal, id: &str) -> Result<SessionRef, ServiceError> {
        let session = self.inner.sessions.lock().get(id)?;
        let owner_matches = session.lock().owner == caller.name;
        if owner_matches {
            Ok(session)
        } else {
            Err(ServiceError::SessionNotFound { notice: None })
        }
    }

    fn touch(&self, s: &mut Session) {
        s.last_used = self.now();
    }

    fn end_session(&self, session: &SessionRef, notice: &str) {
        let mut s = session.lock();
        s.stop_stream();
        if s.state == FsmState::Pause || s.state == FsmState::Ready {
            let _ = s.step(Action::Close);
        }
        s.clear_resolution();
        let id = s.id.clone();
        drop(s);
        self.inner.sessions.lock().remove(&id, notice);
    }

    fn end_all_sessions(&self, notice: &str) {
        let all = self.inner.sessions.lock().all();
        for s in &all {
            self.end_session(s, notice);
        }
    }

    pub(crate) fn stream_tick(&self, s: &mut Session, shared: &StreamShared) -> Tick {
        self.touch(s);
        let config = self.inner.config.read().clone();
        let Some(goal) = s.goal.clone().filter(|g| config.goal_list.iter().any(|t| is_instance(g, t))) else {
            return Tick::End;
        };
        let deadline = Some(Instant::now() + Duration::from_millis(config.default_deadline_ms));
        if shared.pinned {
            let Some(cursor) = s.cursor.as_mut() else {
                return Tick::End;
            };
            cursor.set_deadline(deadline);
            return match collect(cursor, 0, shared.count) {
                Ok(batch) if batch.len() == 1 && !batch[0].is_success() && batch[0].error.is_none() => Tick::End,
                Ok(batch) if batch.iter().any(|a| a.error.is_some()) => Tick::Last(batch),
                Ok(batch) if !cursor.may_have_more() => Tick::Last(batch),
                Ok(batch) => Tick::Deliver(batch),
                Err(ServiceError::DeadlineExceeded { mut partial }) => {
                    partial.push(Answer { error: Some(SolveError::DeadlineExceeded), ..Answer::exhausted(goal) });
                    partial.last_mut().expect("just pushed").more = true;
                    Tick::Deliver(partial)
                }
                Err(_) => Tick::End,
            };
        }
        let snapshot = self.inner.kb.snapshot_at(self.now());
        let mut cursor = self.cursor(&snapshot, goal.clone(), config.kb_mode);
        cursor.set_deadline(deadline);
        let mut batch = match collect(&mut cursor, 0, shared.count) {
            Ok(batch) => batch,
            Err(ServiceError::DeadlineExceeded { mut partial }) => {
                partial.push(Answer { error: Some(SolveError::DeadlineExceeded), ..Answer::exhausted(goal) });
                partial
            }
            Err(_) => return Tick::End,
        };
        // the stream itself goes on regardless of this snapshot's answers
        for a in &mut batch {
            a.more = true;
        }
        Tick::Deliver(batch)
    }

    fn persist(&self) -> Result<(), ServiceError> {
        let Some(store) = &self.inner.store else {
            return Ok(());
        };
        let state = {
            let config = self.inner.config.read();
            PersistedState {
                format_version: FORMAT_VERSION,
                config: config.public().into(),
                goals: config.goal_list.iter().map(ToString::to_string).collect(),
                theory: self
                    .inner
                    .kb
                    .configurator_entries()
                    .into_iter()
                    .map(|e| StoredClause { clause: e.clause.to_string(), validity: e.validity })
                    .collect(),
                users: self.inner.users.read().clone(),
            }
        };
        store.save(&state).map_err(|e| ServiceError::Persistence(e.to_string()))
    }
}

impl Default for Service {
    fn default() -> Self {
        Service::new()
    }
}

impl Admin<'_> {
    pub fn configuration(&self) -> ServiceConfig {
        self.service.inner.config.read().clone()
    }

    /// Replaces the configuration. Sessions that no longer fit (stateful
    /// mode switched off, knowledge base mode changed) are closed.
    pub fn set_configuration(&self, config: ServiceConfig) -> Result<(), ServiceError> {
        config.validate()?;
        let inner = &self.service.inner;
        let previous = std::mem::replace(&mut *inner.config.write(), config.clone());
        if previous.kb_mode != config.kb_mode {
            inner.kb.set_dynamic(config.kb_mode == KbMode::Dynamic, self.service.now());
            self.service.end_all_sessions("knowledge base mode changed");
        } else if !config.stateful_enabled {
            self.service.end_all_sessions("stateful interaction disabled");
        }
        self.service.persist()
    }

    /// Restores the built-in defaults, which include an empty goal list.
    pub fn reset_configuration(&self) -> Result<(), ServiceError> {
        self.set_configuration(ServiceConfig::default())
    }

    pub fn goals(&self) -> Vec<Term> {
        self.service.goals()
    }

    pub fn set_goals(&self, goals: Vec<Term>) -> Result<(), ServiceError> {
        let mut config = self.configuration();
        config.goal_list = goals;
        config.validate()?;
        *self.service.inner.config.write() = config;
        self.service.persist()
    }

    /// Replaces the configurator theory from now on; sensor facts stay.
    pub fn set_theory(&self, clauses: Vec<Clause>) -> Result<(), ServiceError> {
        self.service.inner.kb.set_theory(clauses, self.service.now());
        self.service.persist()
    }

    /// Clauses valid at `at` (default: now), in any knowledge base mode.
    pub fn theory(&self, at: Option<Timestamp>) -> Vec<TimedClause> {
        self.service.inner.kb.get_theory(at.unwrap_or_else(|| self.service.now()))
    }

    /// Every stored clause with its validity, including ended ones and
    /// sensor facts.
    pub fn timeline(&self) -> Vec<TimedClause> {
        self.service.inner.kb.entries()
    }

    /// Adds or replaces a user.
    pub fn put_user(&self, user: UserRecord) -> Result<(), ServiceError> {
        {
            let mut users = self.service.inner.users.write();
            users.retain(|u| u.username != user.username);
            users.push(user);
        }
        self.service.persist()
    }

    pub fn prune(&self, before: Timestamp) -> usize {
        self.service.inner.kb.prune(before)
    }
}

/// Skips `skip` solutions, then gathers up to `count`. An empty result is
/// reported as the no-more-solutions marker; resolution errors other than
/// the deadline end the batch in-band.
fn collect(cursor: &mut Solutions, skip: usize, count: Count) -> Result<Vec<Answer>, ServiceError> {
    let goal = cursor.goal().clone();
    for _ in 0..skip {
        match cursor.next() {
            Some(Ok(_)) => {}
            None => return Ok(vec![Answer::exhausted(goal)]),
            Some(Err(SolveError::DeadlineExceeded)) => return Err(ServiceError::DeadlineExceeded { partial: Vec::new() }),
            Some(Err(e)) => return Ok(vec![Answer::failed(goal, e)]),
        }
    }
    let mut out = Vec::new();
    while count.limit().is_none_or(|n| out.len() < n) {
        match cursor.next() {
            Some(Ok(s)) => out.push(Answer::success(s, true)),
            None => break,
            Some(Err(SolveError::DeadlineExceeded)) => return Err(ServiceError::DeadlineExceeded { partial: out }),
            Some(Err(e)) => {
                out.push(Answer::failed(goal, e));
                return Ok(out);
            }
        }
    }
    match out.last_mut() {
        None => Ok(vec![Answer::exhausted(goal)]),
        Some(last) => {
            last.more = cursor.may_have_more();
            Ok(out)
        }
    }
}
