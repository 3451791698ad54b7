//! HTTP facade over [`Service`].
//!
//! | route | role |
//! |---|---|
//! | `POST /auth` | anyone |
//! | `GET /health` | anyone |
//! | `GET /service/configuration`, `GET /service/goals`, `GET /service/theory?at=` | client |
//! | `POST /service/goals/check`, `POST /service/solve` | client |
//! | `POST /service/sessions`, `GET`/`DELETE /service/sessions/{id}` | client |
//! | `POST /service/sessions/{id}/goal`, `.../solve`, `.../stream`, `.../pause`, `.../resume`, `.../reset` | client |
//! | `POST /sensor/facts` | any authenticated caller |
//! | `GET`/`PUT`/`DELETE /admin/configuration`, `GET`/`PUT /admin/goals`, `GET`/`PUT /admin/theory` | configurator |
//!
//! Streams answer with `application/x-ndjson`, one [`WireSolution`] per
//! line, and always end with a record whose `more` is false.

use std::future::Future;
use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Duration;

use axum::body::{Body, Bytes};
use axum::extract::{FromRequest, FromRequestParts, Path, Query, Request, State};
use axum::http::request::Parts;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::serve::ListenerExt;
use axum::{Json, Router};
use lpaas_core::access::{Principal, Role, UserRecord};
use lpaas_core::clock::Timestamp;
use lpaas_core::kb::KbError;
use lpaas_core::logic::{parse_term, parse_theory};
use lpaas_core::persistence::{Store, StoreError};
use lpaas_core::service::{Answer, Service, ServiceError, ServiceOptions};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tokio::net::TcpListener;
use tokio::sync::{mpsc, oneshot};

use crate::auth::{TokenAuthority, TokenError};
use crate::settings::Settings;
use crate::wire::{
    self, ConfigBody, ErrorBody, FactBody, GoalBody, GoalCheck, GoalCheckResponse, GoalsBody, LoginRequest,
    LoginResponse, SessionCreated, SessionView, SolutionsResponse, SolveBody, StreamBody, TheoryBody,
    TheoryResponse, WireError, WireSolution, NDJSON,
};

#[derive(Debug, Clone)]
pub struct AppState {
    pub service: Service,
    pub tokens: Arc<TokenAuthority>,
    pub require_client_auth: bool,
}

impl AppState {
    pub fn new(service: Service, tokens: TokenAuthority) -> Self {
        AppState { service, tokens: Arc::new(tokens), require_client_auth: false }
    }
}

/// Builds the service described by `settings`, loading the store if any.
pub fn build_service(settings: &Settings) -> Result<Service, StoreError> {
    let mut b = Service::builder()
        .options(ServiceOptions { session_ttl_ms: settings.session_ttl_ms, ..Default::default() });
    if let Some(path) = &settings.store {
        b = b.store(Store::new(path));
    }
    for u in &settings.users {
        b = b.user(UserRecord::new(&u.username, &u.password, u.role));
    }
    b.build()
}

pub fn app_state(settings: &Settings, service: Service) -> AppState {
    let tokens = match &settings.token_secret {
        Some(secret) => TokenAuthority::new(secret.as_bytes().to_vec(), settings.token_ttl_ms),
        None => TokenAuthority::ephemeral(settings.token_ttl_ms),
    };
    AppState { service, tokens: Arc::new(tokens), require_client_auth: settings.require_client_auth }
}

// ----- errors -----

#[derive(Debug)]
pub enum ApiError {
    Service(ServiceError),
    /// Missing, malformed or expired credentials.
    Unauthenticated(String),
    /// A body or query string that does not decode.
    BadRequest(String),
    Internal(String),
}

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        ApiError::Service(e)
    }
}

/// The HTTP status of every service error.
pub fn status_of(e: &ServiceError) -> StatusCode {
    match e {
        ServiceError::InvalidConfig(_)
        | ServiceError::Syntax(_)
        | ServiceError::InvalidRequest(_)
        | ServiceError::IndexOutOfRange { .. }
        | ServiceError::TimestampRejected
        | ServiceError::Kb(KbError::NonFact)
        | ServiceError::Kb(KbError::InvalidLease) => StatusCode::BAD_REQUEST,
        ServiceError::Unauthorized
        | ServiceError::GoalNotPermitted(_)
        | ServiceError::StatelessDisabled
        | ServiceError::StatefulDisabled => StatusCode::FORBIDDEN,
        ServiceError::SessionNotFound { .. } => StatusCode::NOT_FOUND,
        ServiceError::DeadlineExceeded { .. } => StatusCode::REQUEST_TIMEOUT,
        ServiceError::IllegalTransition { .. } | ServiceError::NoGoalSelected | ServiceError::Kb(KbError::StaticKb) => {
            StatusCode::CONFLICT
        }
        ServiceError::Persistence(_) => StatusCode::INTERNAL_SERVER_ERROR,
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, code, message, solutions) = match self {
            ApiError::Service(e) => {
                let partial = match &e {
                    ServiceError::DeadlineExceeded { partial } => Some(wire::solutions(partial)),
                    _ => None,
                };
                (status_of(&e), e.code().to_string(), e.to_string(), partial)
            }
            ApiError::Unauthenticated(m) => (StatusCode::UNAUTHORIZED, "Unauthenticated".into(), m, None),
            ApiError::BadRequest(m) => (StatusCode::BAD_REQUEST, "BadRequest".into(), m, None),
            ApiError::Internal(m) => (StatusCode::INTERNAL_SERVER_ERROR, "Internal".into(), m, None),
        };
        (status, Json(ErrorBody { error: WireError { code, message }, solutions })).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

/// Runs service work that may block (resolution, hashing, disk) off the
/// async workers.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ServiceError> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f).await.map_err(|e| ApiError::Internal(e.to_string()))?.map_err(ApiError::from)
}

// ----- extractors -----

/// JSON body whose decoding errors answer 400 with the usual error body.
pub struct JsonBody<T>(pub T);

impl<S: Send + Sync, T: DeserializeOwned> FromRequest<S> for JsonBody<T> {
    type Rejection = ApiError;

    async fn from_request(req: Request, state: &S) -> Result<Self, ApiError> {
        Json::<T>::from_request(req, state).await.map(|Json(v)| JsonBody(v)).map_err(|e| ApiError::BadRequest(e.body_text()))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AtQuery {
    at: Option<u64>,
}

struct At(Option<Timestamp>);

impl<S: Send + Sync> FromRequestParts<S> for At {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &S) -> Result<Self, ApiError> {
        let Query(q) = Query::<AtQuery>::from_request_parts(parts, state)
            .await
            .map_err(|e| ApiError::BadRequest(e.body_text()))?;
        Ok(At(q.at.map(Timestamp)))
    }
}

fn bearer(parts: &Parts) -> Result<Option<&str>, ApiError> {
    let Some(value) = parts.headers.get(header::AUTHORIZATION) else {
        return Ok(None);
    };
    let text = value.to_str().map_err(|_| ApiError::Unauthenticated("unreadable authorization header".into()))?;
    text.strip_prefix("Bearer ")
        .map(|t| Some(t.trim()))
        .ok_or_else(|| ApiError::Unauthenticated("expected a bearer token".into()))
}

fn verify(state: &AppState, token: &str) -> Result<Principal, ApiError> {
    state.tokens.verify(token).map_err(|e| {
        ApiError::Unauthenticated(match e {
            TokenError::Expired => "token expired".into(),
            other => format!("invalid token: {other}"),
        })
    })
}

/// The calling client; anonymous when no token is sent and the server
/// allows it.
pub struct Caller(pub Principal);

impl FromRequestParts<AppState> for Caller {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &AppState) -> Result<Self, ApiError> {
        match bearer(parts)? {
            Some(token) => verify(state, token).map(Caller),
            None if state.require_client_auth => Err(ApiError::Unauthenticated("authentication required".into())),
            None => Ok(Caller(Principal::anonymous())),
        }
    }
}

/// A caller that presented a valid token.
pub struct Authenticated(pub Principal);

impl FromRequestParts<AppState> for Authenticated {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &AppState) -> Result<Self, ApiError> {
        match bearer(parts)? {
            Some(token) => verify(state, token).map(Authenticated),
            None => Err(ApiError::Unauthenticated("authentication required".into())),
        }
    }
}

/// A caller holding the configurator role.
pub struct Configurator(pub Principal);

impl FromRequestParts<AppState> for Configurator {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &AppState) -> Result<Self, ApiError> {
        let Authenticated(who) = Authenticated::from_request_parts(parts, state).await?;
        state.service.admin(&who)?;
        Ok(Configurator(who))
    }
}

// ----- routes -----

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/auth", post(login))
        .route("/health", get(health))
        .route("/service/configuration", get(service_configuration))
        .route("/service/theory", get(service_theory))
        .route("/service/goals", get(service_goals))
        .route("/service/goals/check", post(check_goal))
        .route("/service/solve", post(solve))
        .route("/service/sessions", post(open_session))
        .route("/service/sessions/{id}", get(session_info).delete(close_session))
        .route("/service/sessions/{id}/goal", post(set_goal))
        .route("/service/sessions/{id}/solve", post(solve_session))
        .route("/service/sessions/{id}/stream", post(stream))
        .route("/service/sessions/{id}/pause", post(pause))
        .route("/service/sessions/{id}/resume", post(resume))
        .route("/service/sessions/{id}/reset", post(reset))
        .route("/sensor/facts", post(ingest_fact))
        .route("/admin/configuration", get(get_configuration).put(set_configuration).delete(reset_configuration))
        .route("/admin/goals", get(get_goals).put(set_goals))
        .route("/admin/theory", get(get_theory).put(set_theory))
        .with_state(state)
}

async fn login(State(app): State<AppState>, JsonBody(body): JsonBody<LoginRequest>) -> ApiResult<LoginResponse> {
    let service = app.service.clone();
    let who = blocking(move || Ok(service.authenticate(&body.username, &body.password))).await?;
    let who = who.ok_or_else(|| ApiError::Unauthenticated("bad username or password".into()))?;
    let (token, expires_at) = app.tokens.issue(&who);
    Ok(Json(LoginResponse { token, role: who.role.to_string(), expires_at }))
}

#[derive(Serialize)]
struct Health {
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    notice: Option<String>,
}

async fn health(State(app): State<AppState>) -> Json<Health> {
    Json(Health { status: "ok", notice: app.service.startup_notice().map(str::to_string) })
}

async fn service_configuration(State(app): State<AppState>, _: Caller) -> Json<lpaas_core::service::PublicConfig> {
    Json(app.service.service_configuration())
}

async fn service_theory(State(app): State<AppState>, _: Caller, At(at): At) -> ApiResult<TheoryResponse> {
    let theory = app.service.theory(at)?;
    Ok(Json(TheoryResponse { theory: theory.iter().map(Into::into).collect() }))
}

async fn service_goals(State(app): State<AppState>, _: Caller) -> Json<GoalsBody> {
    Json(GoalsBody::from_terms(&app.service.goals()))
}

async fn check_goal(
    State(app): State<AppState>,
    _: Caller,
    JsonBody(body): JsonBody<GoalCheck>,
) -> ApiResult<GoalCheckResponse> {
    let goal = parse_term(&body.goal).map_err(|e| ServiceError::Syntax(e.to_string()))?;
    Ok(Json(GoalCheckResponse { is_goal: app.service.is_goal(&goal), goal: body.goal }))
}

fn solutions_response(answers: Vec<Answer>) -> Json<SolutionsResponse> {
    Json(SolutionsResponse { solutions: wire::solutions(&answers) })
}

async fn solve(State(app): State<AppState>, _: Caller, JsonBody(body): JsonBody<SolveBody>) -> ApiResult<SolutionsResponse> {
    let req = body.to_request()?;
    let answers = blocking(move || app.service.solve(&req)).await?;
    Ok(solutions_response(answers))
}

async fn open_session(State(app): State<AppState>, Caller(who): Caller) -> Result<(StatusCode, Json<SessionCreated>), ApiError> {
    let session = app.service.open_session(&who)?;
    Ok((StatusCode::CREATED, Json(SessionCreated { session })))
}

fn view(app: &AppState, who: &Principal, id: &str) -> Result<Json<SessionView>, ApiError> {
    Ok(Json(app.service.session_info(who, id)?.into()))
}

async fn session_info(State(app): State<AppState>, Caller(who): Caller, Path(id): Path<String>) -> ApiResult<SessionView> {
    view(&app, &who, &id)
}

async fn close_session(
    State(app): State<AppState>,
    Caller(who): Caller,
    Path(id): Path<String>,
) -> Result<Json<serde_json::Value>, ApiError> {
    app.service.close(&who, &id)?;
    Ok(Json(serde_json::json!({ "session": id, "state": "NoGoalSelected" })))
}

async fn set_goal(
    State(app): State<AppState>,
    Caller(who): Caller,
    Path(id): Path<String>,
    JsonBody(body): JsonBody<GoalBody>,
) -> ApiResult<SessionView> {
    app.service.set_goal(&who, &id, &body.to_selector()?)?;
    view(&app, &who, &id)
}

async fn solve_session(
    State(app): State<AppState>,
    Caller(who): Caller,
    Path(id): Path<String>,
    JsonBody(body): JsonBody<SolveBody>,
) -> ApiResult<SolutionsResponse> {
    let req = body.to_request()?;
    let answers = blocking(move || app.service.solve_session(&who, &id, &req)).await?;
    Ok(solutions_response(answers))
}

fn ndjson_line(record: &WireSolution) -> Bytes {
    let mut line = serde_json::to_vec(record).expect("solutions serialise");
    line.push(b'\n');
    Bytes::from(line)
}

async fn stream(
    State(app): State<AppState>,
    Caller(who): Caller,
    Path(id): Path<String>,
    JsonBody(body): JsonBody<StreamBody>,
) -> Result<Response, ApiError> {
    let req = body.to_request();
    let service = app.service.clone();
    let handle = blocking(move || service.stream(&who, &id, &req)).await?;
    let (tx, mut rx) = mpsc::channel::<Bytes>(16);
    tokio::task::spawn_blocking(move || {
        let mut open_ended = true;
        while let Some(batch) = handle.next_delivery() {
            for answer in &batch {
                open_ended = answer.more;
                if tx.blocking_send(ndjson_line(&WireSolution::from(answer))).is_err() {
                    log::debug!("stream consumer for session {} went away", handle.session_id());
                    handle.cancel();
                    return;
                }
            }
        }
        if open_ended {
            let _ = tx.blocking_send(ndjson_line(&WireSolution::from(&Answer::exhausted(handle.goal().clone()))));
        }
    });
    let body = futures::stream::poll_fn(move |cx| rx.poll_recv(cx).map(|o| o.map(Ok::<_, std::convert::Infallible>)));
    Ok(([(header::CONTENT_TYPE, NDJSON)], Body::from_stream(body)).into_response())
}

async fn pause(State(app): State<AppState>, Caller(who): Caller, Path(id): Path<String>) -> ApiResult<SessionView> {
    app.service.pause(&who, &id)?;
    view(&app, &who, &id)
}

async fn resume(State(app): State<AppState>, Caller(who): Caller, Path(id): Path<String>) -> ApiResult<SessionView> {
    app.service.resume(&who, &id)?;
    view(&app, &who, &id)
}

async fn reset(State(app): State<AppState>, Caller(who): Caller, Path(id): Path<String>) -> ApiResult<SessionView> {
    app.service.reset(&who, &id)?;
    view(&app, &who, &id)
}

async fn ingest_fact(
    State(app): State<AppState>,
    _: Authenticated,
    JsonBody(body): JsonBody<FactBody>,
) -> Result<(StatusCode, Json<FactBody>), ApiError> {
    let fact = wire::parse_fact(&body.fact)?;
    app.service.ingest_fact(fact.clone(), body.lease_ms)?;
    Ok((StatusCode::CREATED, Json(FactBody { fact: fact.to_string(), lease_ms: body.lease_ms })))
}

async fn get_configuration(State(app): State<AppState>, Configurator(who): Configurator) -> ApiResult<ConfigBody> {
    Ok(Json(ConfigBody::from(&app.service.admin(&who)?.configuration())))
}

async fn set_configuration(
    State(app): State<AppState>,
    Configurator(who): Configurator,
    JsonBody(body): JsonBody<ConfigBody>,
) -> ApiResult<ConfigBody> {
    let config = body.to_config()?;
    blocking(move || {
        let admin = app.service.admin(&who)?;
        admin.set_configuration(config)?;
        Ok(Json(ConfigBody::from(&admin.configuration())))
    })
    .await
}

async fn reset_configuration(State(app): State<AppState>, Configurator(who): Configurator) -> ApiResult<ConfigBody> {
    blocking(move || {
        let admin = app.service.admin(&who)?;
        admin.reset_configuration()?;
        Ok(Json(ConfigBody::from(&admin.configuration())))
    })
    .await
}

async fn get_goals(State(app): State<AppState>, Configurator(who): Configurator) -> ApiResult<GoalsBody> {
    Ok(Json(GoalsBody::from_terms(&app.service.admin(&who)?.goals())))
}

async fn set_goals(
    State(app): State<AppState>,
    Configurator(who): Configurator,
    JsonBody(body): JsonBody<GoalsBody>,
) -> ApiResult<GoalsBody> {
    let goals = body.to_terms()?;
    blocking(move || {
        let admin = app.service.admin(&who)?;
        admin.set_goals(goals)?;
        Ok(Json(GoalsBody::from_terms(&admin.goals())))
    })
    .await
}

/// The full timeline, ended clauses and sensor facts included.
async fn get_theory(State(app): State<AppState>, Configurator(who): Configurator) -> ApiResult<TheoryResponse> {
    let timeline = app.service.admin(&who)?.timeline();
    Ok(Json(TheoryResponse { theory: timeline.iter().map(Into::into).collect() }))
}

async fn set_theory(
    State(app): State<AppState>,
    Configurator(who): Configurator,
    JsonBody(body): JsonBody<TheoryBody>,
) -> ApiResult<TheoryResponse> {
    let clauses = parse_theory(&body.theory).map_err(|e| ServiceError::Syntax(e.to_string()))?;
    blocking(move || {
        let admin = app.service.admin(&who)?;
        admin.set_theory(clauses)?;
        Ok(Json(TheoryResponse { theory: admin.theory(None).iter().map(Into::into).collect() }))
    })
    .await
}

// ----- running -----

/// Serves until `shutdown` resolves. Open streams are then closed, each
/// ending with its terminal record, before the server returns.
pub async fn serve(
    listener: TcpListener,
    state: AppState,
    gc_interval: Duration,
    kb_retention_ms: u64,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let service = state.service.clone();
    let gc = tokio::spawn({
        let service = service.clone();
        async move {
            let mut tick = tokio::time::interval(gc_interval);
            loop {
                tick.tick().await;
                let service = service.clone();
                let _ = tokio::task::spawn_blocking(move || {
                    let expired = service.collect_expired();
                    if expired > 0 {
                        log::info!("closed {expired} idle session(s)");
                    }
                    if let Some(cutoff) = service.now().millis().checked_sub(kb_retention_ms) {
                        if let Ok(admin) = service.admin(&Principal::new("gc", Role::Configurator)) {
                            admin.prune(Timestamp(cutoff));
                        }
                    }
                })
                .await;
            }
        }
    });
    // small stream records must not wait for delayed acks
    let listener = listener.tap_io(|tcp| {
        if let Err(e) = tcp.set_nodelay(true) {
            log::warn!("cannot set TCP_NODELAY: {e}");
        }
    });
    let result = axum::serve(listener, router(state))
        .with_graceful_shutdown(async move {
            shutdown.await;
            log::info!("shutting down");
            service.stop_streams();
        })
        .await;
    gc.abort();
    result
}

/// Resolves on Ctrl-C or SIGTERM.
pub async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {}
        _ = term => {}
    }
}

/// A server on its own runtime thread, for embedding and tests. Dropping
/// it shuts the server down.
#[derive(Debug)]
pub struct BackgroundServer {
    addr: SocketAddr,
    stop: Option<oneshot::Sender<()>>,
    thread: Option<std::thread::JoinHandle<std::io::Result<()>>>,
}

impl BackgroundServer {
    pub fn start(state: AppState, addr: SocketAddr) -> std::io::Result<BackgroundServer> {
        let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
        let listener = runtime.block_on(TcpListener::bind(addr))?;
        let addr = listener.local_addr()?;
        let (stop, stopped) = oneshot::channel::<()>();
        let thread = std::thread::spawn(move || {
            runtime.block_on(serve(listener, state, Duration::from_secs(5), u64::MAX, async {
                let _ = stopped.await;
            }))
        });
        Ok(BackgroundServer { addr, stop: Some(stop), thread: Some(thread) })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn url(&self) -> String {
        format!("http://{}", self.addr)
    }

    pub fn shutdown(mut self) -> std::io::Result<()> {
        self.stop_and_join()
    }

    fn stop_and_join(&mut self) -> std::io::Result<()> {
        if let Some(stop) = self.stop.take() {
            let _ = stop.send(());
        }
        match self.thread.take() {
            Some(t) => t.join().unwrap_or_else(|_| Err(std::io::Error::other("server thread panicked"))),
            None => Ok(()),
        }
    }
}

impl Drop for BackgroundServer {
    fn drop(&mut self) {
        let _ = self.stop_and_join();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use lpaas_core::service::{Action, FsmState};

    #[test]
    fn every_service_error_has_a_status() {
        let samples = [
            ServiceError::Unauthorized,
            ServiceError::InvalidConfig(String::new()),
            ServiceError::Syntax(String::new()),
            ServiceError::InvalidRequest(String::new()),
            ServiceError::GoalNotPermitted(String::new()),
            ServiceError::StatelessDisabled,
            ServiceError::StatefulDisabled,
            ServiceError::IndexOutOfRange { index: 0, len: 0 },
            ServiceError::NoGoalSelected,
            ServiceError::TimestampRejected,
            ServiceError::DeadlineExceeded { partial: Vec::new() },
            ServiceError::SessionNotFound { notice: None },
            ServiceError::IllegalTransition { state: FsmState::Ready, action: Action::Resume },
            ServiceError::Kb(KbError::StaticKb),
            ServiceError::Kb(KbError::NonFact),
            ServiceError::Kb(KbError::InvalidLease),
            ServiceError::Persistence(String::new()),
        ];
        let statuses: Vec<u16> = samples.iter().map(|e| status_of(e).as_u16()).collect();
        assert_eq!(statuses, [403, 400, 400, 400, 403, 403, 403, 400, 409, 400, 408, 404, 409, 409, 400, 400, 500]);
    }
}
