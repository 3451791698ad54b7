use serde::{Deserialize, Serialize};

use crate::clock::Timestamp;
use crate::logic::{SolveError, Solution, Term};

use super::error::ServiceError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    One,
    N,
    All,
    After,
}

/// How many solutions one request asks for, after skipping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Count {
    One,
    N(usize),
    All,
}

impl Count {
    pub fn limit(self) -> Option<usize> {
        match self {
            Count::One => Some(1),
            Count::N(n) => Some(n),
            Count::All => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolveRequest {
    pub mode: Mode,
    /// Required for stateless requests, absent for session requests.
    pub goal: Option<Term>,
    pub n_sol: Option<usize>,
    pub after_n: Option<usize>,
    pub within_ms: Option<u64>,
    pub at: Option<Timestamp>,
    pub every_ms: Option<u64>,
}

impl SolveRequest {
    pub fn one(goal: Term) -> Self {
        SolveRequest { goal: Some(goal), ..Default::default() }
    }

    pub fn n(goal: Term, n: usize) -> Self {
        SolveRequest { mode: Mode::N, goal: Some(goal), n_sol: Some(n), ..Default::default() }
    }

    pub fn all(goal: Term) -> Self {
        SolveRequest { mode: Mode::All, goal: Some(goal), ..Default::default() }
    }

    pub fn after(goal: Term, after_n: usize) -> Self {
        SolveRequest { mode: Mode::After, goal: Some(goal), after_n: Some(after_n), ..Default::default() }
    }

    pub fn within(mut self, ms: u64) -> Self {
        self.within_ms = Some(ms);
        self
    }

    pub fn at(mut self, at: Timestamp) -> Self {
        self.at = Some(at);
        self
    }

    /// Checks field combinations and returns `(skip, count)`.
    ///
    /// `afterN` is accepted with every mode so that the N-after and
    /// all-after variants can be expressed; mode `after` alone means one
    /// solution after skipping.
    pub fn shape(&self) -> Result<(usize, Count), ServiceError> {
        let bad = |m: &str| Err(ServiceError::InvalidRequest(m.into()));
        if self.mode == Mode::N && self.n_sol.is_none() {
            return bad("mode n requires nSol");
        }
        if self.mode != Mode::N && self.n_sol.is_some() {
            return bad("nSol is only valid with mode n");
        }
        if self.mode == Mode::After && self.after_n.is_none() {
            return bad("mode after requires afterN");
        }
        if self.n_sol == Some(0) {
            return bad("nSol must be positive");
        }
        if self.within_ms == Some(0) {
            return bad("withinMs must be positive");
        }
        if self.every_ms == Some(0) {
            return bad("everyMs must be at least 1");
        }
        if self.every_ms.is_some() && self.within_ms.is_some() {
            return bad("within and every cannot be combined");
        }
        let count = match self.mode {
            Mode::One | Mode::After => Count::One,
            Mode::N => Count::N(self.n_sol.unwrap_or(1)),
            Mode::All => Count::All,
        };
        Ok((self.after_n.unwrap_or(0), count))
    }
}

/// Picks a session goal from the whitelist.
#[derive(Debug, Clone, PartialEq)]
pub enum GoalSelector {
    /// 1-based position in the goal list.
    Index(i64),
    Template(Term),
}

/// One delivered result: a solution, a failure, or an in-band resolution error.
#[derive(Debug, Clone, PartialEq)]
pub struct Answer {
    pub solution: Solution,
    /// Whether asking again might produce another solution.
    pub more: bool,
    pub error: Option<SolveError>,
}

impl Answer {
    pub fn success(solution: Solution, more: bool) -> Self {
        Answer { solution, more, error: None }
    }

    /// The no-more-solutions marker.
    pub fn exhausted(goal: Term) -> Self {
        Answer { solution: Solution::failure(goal), more: false, error: None }
    }

    pub fn failed(goal: Term, error: SolveError) -> Self {
        Answer { solution: Solution::failure(goal), more: false, error: Some(error) }
    }

    pub fn is_success(&self) -> bool {
        self.solution.success
    }
}
