//! JSON encoding of terms, solutions and request bodies.
//!
//! Terms travel as tagged trees:
//!
//! ```text
//! {"atom": "hello world"}
//! {"num": 1}            {"num": 1.5}
//! {"var": "X"}
//! {"struct": "f", "args": [{"var": "X"}, {"num": 1}]}
//! ```
//!
//! Integers and floats stay distinct (`1` vs `1.0`). Goals and theories in
//! request bodies are plain Prolog text.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use lpaas_core::clock::Timestamp;
use lpaas_core::kb::{Origin, TimedClause, ValidityInterval};
use lpaas_core::logic::{clause_from_term, parse_term, Clause, Number, Term};
use lpaas_core::service::{
    Answer, FsmState, GoalSelector, KbMode, Mode, PublicConfig, ServiceConfig, ServiceError, SessionInfo,
    SolveRequest, StreamStatus,
};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};

pub const NDJSON: &str = "application/x-ndjson";

/// A term that failed to decode, with the JSON path of the offending node.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{path}: {message}")]
pub struct DecodeError {
    pub path: String,
    pub message: String,
}

pub fn encode_term(term: &Term) -> Value {
    let mut obj = Map::new();
    match term {
        Term::Atom(a) => {
            obj.insert("atom".into(), Value::String(a.to_string()));
        }
        Term::Var(v) => {
            obj.insert("var".into(), Value::String(v.to_string()));
        }
        Term::Number(Number::Int(i)) => {
            obj.insert("num".into(), Value::from(*i));
        }
        Term::Number(Number::Float(f)) => {
            // the parser and evaluator never produce non-finite floats
            let n = serde_json::Number::from_f64(*f).map(Value::Number).unwrap_or(Value::Null);
            obj.insert("num".into(), n);
        }
        Term::Compound(f, args) => {
            obj.insert("struct".into(), Value::String(f.to_string()));
            obj.insert("args".into(), Value::Array(args.iter().map(encode_term).collect()));
        }
    }
    Value::Object(obj)
}

pub fn decode_term(value: &Value) -> Result<Term, DecodeError> {
    decode_at(value, &mut String::from("$"))
}

fn fail<T>(path: &str, message: impl Into<String>) -> Result<T, DecodeError> {
    Err(DecodeError { path: path.to_string(), message: message.into() })
}

fn string_field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a str, DecodeError> {
    obj.get(key).and_then(Value::as_str).map_or_else(|| fail(path, format!("\"{key}\" must be a string")), Ok)
}

fn decode_at(value: &Value, path: &mut String) -> Result<Term, DecodeError> {
    let Value::Object(obj) = value else {
        return fail(path, "expected an object");
    };
    let keys: Vec<&str> = obj.keys().map(String::as_str).collect();
    match keys.as_slice() {
        ["atom"] => Ok(Term::atom(string_field(obj, "atom", path)?)),
        ["var"] => {
            let name = string_field(obj, "var", path)?;
            if !name.starts_with(|c: char| c.is_ascii_uppercase() || c == '_')
                || !name.chars().all(|c| c.is_alphanumeric() || c == '_')
            {
                return fail(path, format!("{name:?} is not a variable name"));
            }
            Ok(Term::var(name))
        }
        ["num"] => match &obj["num"] {
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Term::int(i))
                } else if n.is_u64() {
                    fail(path, "integer out of range")
                } else {
                    Ok(Term::Number(Number::Float(n.as_f64().expect("json numbers are finite"))))
                }
            }
            _ => fail(path, "\"num\" must be a number"),
        },
        ["args", "struct"] | ["struct", "args"] => {
            let functor = string_field(obj, "struct", path)?;
            let Some(Value::Array(args)) = obj.get("args") else {
                return fail(path, "\"args\" must be an array");
            };
            if args.is_empty() {
                return fail(path, "a struct needs at least one argument; use atom for arity 0");
            }
            let mut decoded = Vec::with_capacity(args.len());
            for (i, a) in args.iter().enumerate() {
                let len = path.len();
                path.push_str(&format!(".args[{i}]"));
                decoded.push(decode_at(a, path)?);
                path.truncate(len);
            }
            Ok(Term::Compound(Arc::from(functor), decoded.into()))
        }
        _ => fail(path, format!("unknown term tag set {keys:?}")),
    }
}

/// A [`Term`] with the wire encoding as its serde representation.
#[derive(Debug, Clone, PartialEq)]
pub struct WireTerm(pub Term);

impl Serialize for WireTerm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        encode_term(&self.0).serialize(s)
    }
}

impl<'de> Deserialize<'de> for WireTerm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        decode_term(&v).map(WireTerm).map_err(D::Error::custom)
    }
}

impl fmt::Display for WireTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireError {
    pub code: String,
    pub message: String,
}

/// One solution as delivered to clients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WireSolution {
    pub success: bool,
    pub bindings: BTreeMap<String, WireTerm>,
    pub solved_goal: WireTerm,
    pub more: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<WireError>,
}

impl WireSolution {
    pub fn binding(&self, var: &str) -> Option<&Term> {
        self.bindings.get(var).map(|w| &w.0)
    }

    /// True for the record that ends an enumeration.
    pub fn is_exhausted(&self) -> bool {
        !self.success && !self.more && self.error.is_none()
    }
}

impl From<&Answer> for WireSolution {
    fn from(a: &Answer) -> Self {
        WireSolution {
            success: a.solution.success,
            bindings: a.solution.bindings.iter().map(|(k, v)| (k.to_string(), WireTerm(v.clone()))).collect(),
            solved_goal: WireTerm(a.solution.solved_goal.clone()),
            more: a.more,
            error: a.error.as_ref().map(|e| WireError { code: e.code().into(), message: e.to_string() }),
        }
    }
}

pub fn solutions(answers: &[Answer]) -> Vec<WireSolution> {
    answers.iter().map(WireSolution::from).collect()
}

/// Error response body. `solutions` carries partial results of a request
/// that ran out of time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: WireError,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solutions: Option<Vec<WireSolution>>,
}

// ----- request and response bodies -----

fn parse_goal(text: &str) -> Result<Term, ServiceError> {
    parse_term(text).map_err(|e| ServiceError::Syntax(e.to_string()))
}

/// Parses `temp(20)` or `temp(20).` into a clause.
pub fn parse_fact(text: &str) -> Result<Clause, ServiceError> {
    clause_from_term(parse_goal(text)?).map_err(ServiceError::Syntax)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoginRequest {
    pub username: String,
    pub password: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LoginResponse {
    pub token: String,
    pub role: String,
    pub expires_at: u64,
}

/// Fields of a solve request. `goal` is required on `/service/solve` and
/// refused on session routes.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SolveBody {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goal: Option<String>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_sol: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub after_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub within_ms: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub every_ms: Option<u64>,
}

impl SolveBody {
    pub fn goal(goal: impl Into<String>) -> Self {
        SolveBody { goal: Some(goal.into()), ..Default::default() }
    }

    pub fn to_request(&self) -> Result<SolveRequest, ServiceError> {
        Ok(SolveRequest {
            mode: self.mode,
            goal: self.goal.as_deref().map(parse_goal).transpose()?,
            n_sol: self.n_sol,
            after_n: self.after_n,
            within_ms: self.within_ms,
            at: self.at.map(Timestamp),
            every_ms: self.every_ms,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionsResponse {
    pub solutions: Vec<WireSolution>,
}

/// Session goal selection: exactly one of the two fields.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoalBody {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template: Option<String>,
}

impl GoalBody {
    pub fn to_selector(&self) -> Result<GoalSelector, ServiceError> {
        match (self.index, &self.template) {
            (Some(i), None) => Ok(GoalSelector::Index(i)),
            (None, Some(t)) => Ok(GoalSelector::Template(parse_goal(t)?)),
            _ => Err(ServiceError::InvalidRequest("give exactly one of index and template".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoalCheck {
    pub goal: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GoalCheckResponse {
    pub goal: String,
    pub is_goal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoalsBody {
    pub goals: Vec<String>,
}

impl GoalsBody {
    pub fn from_terms(goals: &[Term]) -> Self {
        GoalsBody { goals: goals.iter().map(ToString::to_string).collect() }
    }

    pub fn to_terms(&self) -> Result<Vec<Term>, ServiceError> {
        self.goals.iter().map(|g| parse_goal(g)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoryBody {
    pub theory: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireClause {
    pub clause: String,
    pub validity: ValidityInterval,
    pub origin: Origin,
}

impl From<&TimedClause> for WireClause {
    fn from(c: &TimedClause) -> Self {
        WireClause { clause: c.clause.to_string(), validity: c.validity, origin: c.origin }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoryResponse {
    pub theory: Vec<WireClause>,
}

impl TheoryResponse {
    /// The clauses as a loadable theory text.
    pub fn text(&self) -> String {
        self.theory.iter().map(|c| format!("{}\n", c.clause)).collect()
    }
}

/// Full configuration as seen by configurators. Missing fields take their
/// default values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct ConfigBody {
    pub kb_mode: KbMode,
    pub stateful_enabled: bool,
    pub stateless_enabled: bool,
    pub default_deadline_ms: u64,
    pub goal_list: Vec<String>,
}

impl Default for ConfigBody {
    fn default() -> Self {
        ConfigBody::from(&ServiceConfig::default())
    }
}

impl From<&ServiceConfig> for ConfigBody {
    fn from(c: &ServiceConfig) -> Self {
        ConfigBody {
            kb_mode: c.kb_mode,
            stateful_enabled: c.stateful_enabled,
            stateless_enabled: c.stateless_enabled,
            default_deadline_ms: c.default_deadline_ms,
            goal_list: c.goal_list.iter().map(ToString::to_string).collect(),
        }
    }
}

impl ConfigBody {
    pub fn to_config(&self) -> Result<ServiceConfig, ServiceError> {
        let public = PublicConfig {
            kb_mode: self.kb_mode,
            stateful_enabled: self.stateful_enabled,
            stateless_enabled: self.stateless_enabled,
            default_deadline_ms: self.default_deadline_ms,
        };
        let goals = self.goal_list.iter().map(|g| parse_goal(g)).collect::<Result<_, _>>()?;
        Ok(ServiceConfig::with_public(public, goals))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FactBody {
    pub fact: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lease_ms: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionCreated {
    pub session: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StreamBody {
    pub every_ms: u64,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_sol: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<u64>,
}

impl StreamBody {
    pub fn to_request(&self) -> SolveRequest {
        SolveRequest {
            mode: self.mode,
            n_sol: self.n_sol,
            at: self.at.map(Timestamp),
            every_ms: Some(self.every_ms),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionView {
    pub session: String,
    pub state: FsmState,
    pub goal: Option<String>,
    pub stream: Option<StreamStatus>,
    pub created: u64,
    pub last_used: u64,
}

impl From<SessionInfo> for SessionView {
    fn from(s: SessionInfo) -> Self {
        SessionView {
            session: s.id,
            state: s.state,
            goal: s.goal,
            stream: s.stream,
            created: s.created.millis(),
            last_used: s.last_used.millis(),
        }
    }
}
