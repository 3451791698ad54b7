//! Blocking client for the HTTP API.

use std::io::{BufRead, BufReader};
use std::time::Duration;

use lpaas_core::service::{Mode, PublicConfig};
use reqwest::blocking::{RequestBuilder, Response};
use reqwest::{Method, StatusCode};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::wire::{
    ConfigBody, ErrorBody, FactBody, GoalBody, GoalCheck, GoalCheckResponse, GoalsBody, LoginRequest, LoginResponse,
    SessionCreated, SessionView, SolutionsResponse, SolveBody, StreamBody, TheoryBody, TheoryResponse, WireSolution,
};

#[derive(Debug, thiserror::Error)]
pub enum ClientError {
    /// The server could not be reached or the connection broke.
    #[error("transport error: {0}")]
    Transport(#[from] reqwest::Error),
    /// The server answered with an error status.
    #[error("{status}: {code}: {message}")]
    Api { status: StatusCode, code: String, message: String, body: serde_json::Value },
    #[error("unexpected response: {0}")]
    Protocol(String),
}

impl ClientError {
    pub fn status(&self) -> Option<StatusCode> {
        match self {
            ClientError::Api { status, .. } => Some(*status),
            _ => None,
        }
    }

    pub fn code(&self) -> Option<&str> {
        match self {
            ClientError::Api { code, .. } => Some(code),
            _ => None,
        }
    }

    /// Solutions found before a deadline ran out.
    pub fn partial_solutions(&self) -> Option<Vec<WireSolution>> {
        match self {
            ClientError::Api { body, .. } => {
                serde_json::from_value::<ErrorBody>(body.clone()).ok().and_then(|b| b.solutions)
            }
            _ => None,
        }
    }
}

/// Where to reach a service and how to authenticate.
#[derive(Debug, Clone)]
pub struct Endpoint {
    pub base_url: String,
    pub token: Option<String>,
    pub timeout: Duration,
}

impl Endpoint {
    pub fn new(base_url: impl Into<String>) -> Self {
        Endpoint { base_url: base_url.into().trim_end_matches('/').to_string(), token: None, timeout: Duration::from_secs(60) }
    }
}

#[derive(Debug, Clone)]
pub struct Client {
    endpoint: Endpoint,
    http: reqwest::blocking::Client,
}

type Result<T> = std::result::Result<T, ClientError>;

impl Client {
    pub fn new(base_url: impl Into<String>) -> Self {
        Client::with_endpoint(Endpoint::new(base_url))
    }

    pub fn with_endpoint(endpoint: Endpoint) -> Self {
        // no client-wide timeout: streams stay open indefinitely
        let http = reqwest::blocking::Client::builder().timeout(None).build().expect("http client");
        Client { endpoint, http }
    }

    pub fn with_token(mut self, token: impl Into<String>) -> Self {
        self.endpoint.token = Some(token.into());
        self
    }

    pub fn endpoint(&self) -> &Endpoint {
        &self.endpoint
    }

    fn request(&self, method: Method, path: &str) -> RequestBuilder {
        let mut r = self.http.request(method, format!("{}{}", self.endpoint.base_url, path));
        if let Some(t) = &self.endpoint.token {
            r = r.bearer_auth(t);
        }
        r
    }

    fn send(&self, r: RequestBuilder) -> Result<Response> {
        let resp = r.send()?;
        if resp.status().is_success() {
            return Ok(resp);
        }
        let status = resp.status();
        let body: serde_json::Value = resp.json().unwrap_or(serde_json::Value::Null);
        let (code, message) = match serde_json::from_value::<ErrorBody>(body.clone()) {
            Ok(e) => (e.error.code, e.error.message),
            Err(_) => (status.canonical_reason().unwrap_or("error").to_string(), body.to_string()),
        };
        Err(ClientError::Api { status, code, message, body })
    }

    fn call<B: Serialize, T: DeserializeOwned>(&self, method: Method, path: &str, body: Option<&B>) -> Result<T> {
        let mut r = self.request(method, path).timeout(self.endpoint.timeout);
        if let Some(b) = body {
            r = r.json(b);
        }
        let resp = self.send(r)?;
        let text = resp.text()?;
        serde_json::from_str(&text).map_err(|e| ClientError::Protocol(format!("{e}: {text}")))
    }

    fn get<T: DeserializeOwned>(&self, path: &str) -> Result<T> {
        self.call::<(), T>(Method::GET, path, None)
    }

    /// Raw JSON of any route, for tools that print server output verbatim.
    pub fn raw(&self, method: Method, path: &str, body: Option<&serde_json::Value>) -> Result<serde_json::Value> {
        self.call(method, path, body)
    }

    // ----- access -----

    pub fn health(&self) -> Result<serde_json::Value> {
        self.get("/health")
    }

    pub fn login(&self, username: &str, password: &str) -> Result<LoginResponse> {
        let body = LoginRequest { username: username.into(), password: password.into() };
        self.call(Method::POST, "/auth", Some(&body))
    }

    /// Logs in and returns a client carrying the token.
    pub fn authenticated(self, username: &str, password: &str) -> Result<Client> {
        let token = self.login(username, password)?.token;
        Ok(self.with_token(token))
    }

    // ----- configurator -----

    pub fn get_configuration(&self) -> Result<ConfigBody> {
        self.get("/admin/configuration")
    }

    pub fn set_configuration(&self, config: &ConfigBody) -> Result<ConfigBody> {
        self.call(Method::PUT, "/admin/configuration", Some(config))
    }

    pub fn reset_configuration(&self) -> Result<ConfigBody> {
        self.call::<(), _>(Method::DELETE, "/admin/configuration", None)
    }

    pub fn set_theory(&self, theory: &str) -> Result<TheoryResponse> {
        self.call(Method::PUT, "/admin/theory", Some(&TheoryBody { theory: theory.into() }))
    }

    /// Every stored clause with its validity.
    pub fn get_theory_timeline(&self) -> Result<TheoryResponse> {
        self.get("/admin/theory")
    }

    pub fn set_goals(&self, goals: &[&str]) -> Result<GoalsBody> {
        let body = GoalsBody { goals: goals.iter().map(|g| g.to_string()).collect() };
        self.call(Method::PUT, "/admin/goals", Some(&body))
    }

    pub fn get_admin_goals(&self) -> Result<GoalsBody> {
        self.get("/admin/goals")
    }

    // ----- observation -----

    pub fn service_configuration(&self) -> Result<PublicConfig> {
        self.get("/service/configuration")
    }

    pub fn get_theory(&self, at: Option<u64>) -> Result<TheoryResponse> {
        match at {
            Some(at) => self.get(&format!("/service/theory?at={at}")),
            None => self.get("/service/theory"),
        }
    }

    pub fn get_goals(&self) -> Result<GoalsBody> {
        self.get("/service/goals")
    }

    pub fn is_goal(&self, goal: &str) -> Result<bool> {
        let r: GoalCheckResponse = self.call(Method::POST, "/service/goals/check", Some(&GoalCheck { goal: goal.into() }))?;
        Ok(r.is_goal)
    }

    // ----- stateless usage -----

    pub fn solve_with(&self, body: &SolveBody) -> Result<Vec<WireSolution>> {
        let r: SolutionsResponse = self.call(Method::POST, "/service/solve", Some(body))?;
        Ok(r.solutions)
    }

    pub fn solve(&self, goal: &str) -> Result<WireSolution> {
        first(self.solve_with(&SolveBody::goal(goal))?)
    }

    pub fn solve_n(&self, goal: &str, n: usize) -> Result<Vec<WireSolution>> {
        self.solve_with(&SolveBody { mode: Mode::N, n_sol: Some(n), ..SolveBody::goal(goal) })
    }

    pub fn solve_all(&self, goal: &str) -> Result<Vec<WireSolution>> {
        self.solve_with(&SolveBody { mode: Mode::All, ..SolveBody::goal(goal) })
    }

    pub fn solve_after(&self, goal: &str, after_n: usize) -> Result<WireSolution> {
        first(self.solve_with(&SolveBody { mode: Mode::After, after_n: Some(after_n), ..SolveBody::goal(goal) })?)
    }

    // ----- stateful usage -----

    pub fn open_session(&self) -> Result<Session<'_>> {
        let created: SessionCreated = self.call::<(), _>(Method::POST, "/service/sessions", None)?;
        Ok(Session { client: self, id: created.session })
    }

    /// Handle on an existing session id.
    pub fn session(&self, id: impl Into<String>) -> Session<'_> {
        Session { client: self, id: id.into() }
    }

    // ----- sensor -----

    pub fn assert_fact(&self, fact: &str, lease_ms: Option<u64>) -> Result<FactBody> {
        self.call(Method::POST, "/sensor/facts", Some(&FactBody { fact: fact.into(), lease_ms }))
    }
}

fn first(mut v: Vec<WireSolution>) -> Result<WireSolution> {
    if v.is_empty() {
        return Err(ClientError::Protocol("empty solution list".into()));
    }
    Ok(v.swap_remove(0))
}

/// A stateful session on the server.
#[derive(Debug, Clone)]
pub struct Session<'a> {
    client: &'a Client,
    id: String,
}

impl Session<'_> {
    pub fn id(&self) -> &str {
        &self.id
    }

    fn path(&self, suffix: &str) -> String {
        format!("/service/sessions/{}{suffix}", self.id)
    }

    pub fn info(&self) -> Result<SessionView> {
        self.client.get(&self.path(""))
    }

    pub fn set_goal_template(&self, template: &str) -> Result<SessionView> {
        let body = GoalBody { template: Some(template.into()), index: None };
        self.client.call(Method::POST, &self.path("/goal"), Some(&body))
    }

    pub fn set_goal_index(&self, index: i64) -> Result<SessionView> {
        let body = GoalBody { index: Some(index), template: None };
        self.client.call(Method::POST, &self.path("/goal"), Some(&body))
    }

    pub fn solve_with(&self, body: &SolveBody) -> Result<Vec<WireSolution>> {
        let r: SolutionsResponse = self.client.call(Method::POST, &self.path("/solve"), Some(body))?;
        Ok(r.solutions)
    }

    pub fn solve(&self) -> Result<WireSolution> {
        first(self.solve_with(&SolveBody::default())?)
    }

    pub fn solve_n(&self, n: usize) -> Result<Vec<WireSolution>> {
        self.solve_with(&SolveBody { mode: Mode::N, n_sol: Some(n), ..Default::default() })
    }

    pub fn solve_all(&self) -> Result<Vec<WireSolution>> {
        self.solve_with(&SolveBody { mode: Mode::All, ..Default::default() })
    }

    /// Starts a stream; records arrive no faster than one batch per period.
    pub fn stream(&self, body: &StreamBody) -> Result<SolutionStream> {
        let resp = self.client.send(self.client.request(Method::POST, &self.path("/stream")).json(body))?;
        Ok(SolutionStream { lines: BufReader::new(resp) })
    }

    pub fn stream_every(&self, every_ms: u64) -> Result<SolutionStream> {
        self.stream(&StreamBody { every_ms, mode: Mode::One, n_sol: None, at: None })
    }

    fn control(&self, action: &str) -> Result<SessionView> {
        self.client.call::<(), _>(Method::POST, &self.path(action), None)
    }

    pub fn pause(&self) -> Result<SessionView> {
        self.control("/pause")
    }

    pub fn resume(&self) -> Result<SessionView> {
        self.control("/resume")
    }

    pub fn reset(&self) -> Result<SessionView> {
        self.control("/reset")
    }

    pub fn close(&self) -> Result<serde_json::Value> {
        self.client.call::<(), _>(Method::DELETE, &self.path(""), None)
    }
}

/// Records of a stream response, in arrival order.
pub struct SolutionStream {
    lines: BufReader<Response>,
}

impl Iterator for SolutionStream {
    type Item = Result<WireSolution>;

    fn next(&mut self) -> Option<Self::Item> {
        let mut line = String::new();
        match self.lines.read_line(&mut line) {
            Ok(0) => None,
            Ok(_) => Some(serde_json::from_str(line.trim_end()).map_err(|e| ClientError::Protocol(format!("{e}: {line}")))),
            Err(e) => Some(Err(ClientError::Protocol(format!("stream broke: {e}")))),
        }
    }
}
