//! Depth-first, left-to-right SLD resolution with a resumable cursor.
//!
//! The machine keeps an explicit goal stack (a shared linked list, so that
//! choicepoints can capture it in O(1)) and a choicepoint stack. Bindings
//! are triangular and undone through a trail on backtracking. Asking the
//! cursor for the next solution resumes from the most recent choicepoint.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use super::arith;
use super::term::Term;
use super::theory::Theory;
use super::unify::Substitution;

/// Default cap on the number of pending goals in a resolvent.
pub const DEFAULT_MAX_DEPTH: usize = 10_000;

/// How often (in resolution steps) the deadline is polled.
const DEADLINE_POLL: u64 = 256;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error("resolution deadline exceeded")]
    DeadlineExceeded,
    #[error("arithmetic error: {0}")]
    Arithmetic(String),
    #[error("unknown predicate {name}/{arity}")]
    UnknownPredicate { name: String, arity: usize },
    #[error("instantiation error: argument is not sufficiently instantiated")]
    Instantiation,
    #[error("type error: {0} is not callable")]
    NotCallable(String),
}

impl SolveError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            SolveError::DeadlineExceeded => "DeadlineExceeded",
            SolveError::Arithmetic(_) => "ArithmeticError",
            SolveError::UnknownPredicate { .. } => "UnknownPredicate",
            SolveError::Instantiation => "InstantiationError",
            SolveError::NotCallable(_) => "TypeError",
        }
    }
}

/// Caps applied to one resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResolutionLimits {
    /// Maximum number of pending goals; branches that would exceed it are pruned.
    pub max_depth: usize,
    pub deadline: Option<Instant>,
}

impl Default for ResolutionLimits {
    fn default() -> Self {
        ResolutionLimits { max_depth: DEFAULT_MAX_DEPTH, deadline: None }
    }
}

impl ResolutionLimits {
    pub fn with_deadline(deadline: Instant) -> Self {
        ResolutionLimits { deadline: Some(deadline), ..Self::default() }
    }
}

/// What to do with a call to a predicate that has no clauses at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnknownPolicy {
    #[default]
    Error,
    Fail,
}

/// One answer to a query.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub success: bool,
    /// Bindings of the query's named variables; empty on failure.
    pub bindings: Substitution,
    pub solved_goal: Term,
}

impl Solution {
    pub fn failure(goal: Term) -> Solution {
        Solution { success: false, bindings: Substitution::new(), solved_goal: goal }
    }
}

type Cont = Option<Arc<Frame>>;

#[derive(Debug)]
struct Frame {
    goal: Goal,
    next: Cont,
    len: usize,
}

#[derive(Debug, Clone)]
enum Goal {
    Call { term: Term, cut: usize },
    /// Succeeded inside `\+`: drop its choicepoints, then fail.
    NegationFail(usize),
}

// Long goal stacks would otherwise be dropped recursively.
impl Drop for Frame {
    fn drop(&mut self) {
        let mut next = self.next.take();
        while let Some(frame) = next {
            match Arc::try_unwrap(frame) {
                Ok(mut f) => next = f.next.take(),
                Err(_) => break,
            }
        }
    }
}

fn push(goal: Goal, next: Cont) -> Cont {
    let len = next.as_ref().map_or(0, |f| f.len) + 1;
    Some(Arc::new(Frame { goal, next, len }))
}

fn cont_len(c: &Cont) -> usize {
    c.as_ref().map_or(0, |f| f.len)
}

#[derive(Debug)]
enum Alternative {
    /// Remaining candidate clauses for `goal`.
    Clauses { goal: Term, candidates: Arc<[usize]>, next: usize, cont: Cont },
    /// Resume with a different continuation (disjunction, negation).
    Resume(Cont),
}

#[derive(Debug)]
struct ChoicePoint {
    alt: Alternative,
    trail_len: usize,
}

/// Lazy, resumable sequence of solutions. Single consumer.
#[derive(Debug)]
pub struct Solutions {
    theory: Arc<Theory>,
    query: Term,
    query_vars: Vec<Arc<str>>,
    limits: ResolutionLimits,
    unknown: UnknownPolicy,
    bindings: HashMap<Arc<str>, Term>,
    trail: Vec<Arc<str>>,
    choices: Vec<ChoicePoint>,
    goals: Cont,
    fresh: u64,
    steps: u64,
    started: bool,
    /// The last call stopped at the deadline mid-branch.
    interrupted: bool,
    done: bool,
    depth_exceeded: bool,
    produced: usize,
}

/// Starts a resolution of `goal` against `theory`.
pub fn solve_iter(theory: Arc<Theory>, goal: Term, limits: ResolutionLimits) -> Solutions {
    Solutions::new(theory, goal, limits, UnknownPolicy::Error)
}

impl Solutions {
    pub fn new(theory: Arc<Theory>, goal: Term, limits: ResolutionLimits, unknown: UnknownPolicy) -> Self {
        let query_vars = goal.variables().into_iter().filter(|v| !v.starts_with('_')).collect();
        let goals = push(Goal::Call { term: goal.clone(), cut: 0 }, None);
        Solutions {
            theory,
            query: goal,
            query_vars,
            limits,
            unknown,
            bindings: HashMap::new(),
            trail: Vec::new(),
            choices: Vec::new(),
            goals,
            fresh: 0,
            steps: 0,
            started: false,
            interrupted: false,
            done: false,
            depth_exceeded: false,
            produced: 0,
        }
    }

    pub fn goal(&self) -> &Term {
        &self.query
    }

    /// Whether some branch was pruned by the depth cap.
    pub fn depth_exceeded(&self) -> bool {
        self.depth_exceeded
    }

    /// Number of solutions produced so far.
    pub fn produced(&self) -> usize {
        self.produced
    }

    /// Whether the search is finished.
    pub fn is_exhausted(&self) -> bool {
        self.done
    }

    /// Whether asking for another solution might succeed. `false` means
    /// the next call will certainly report exhaustion.
    pub fn may_have_more(&self) -> bool {
        !self.done && (!self.started || !self.choices.is_empty())
    }

    /// Replaces the deadline for subsequent calls (cursors outlive requests).
    pub fn set_deadline(&mut self, deadline: Option<Instant>) {
        self.limits.deadline = deadline;
    }

    fn deref(&self, t: &Term) -> Term {
        let mut cur = t;
        while let Term::Var(v) = cur {
            match self.bindings.get(v) {
                Some(next) => cur = next,
                None => break,
            }
        }
        cur.clone()
    }

    /// Applies all bindings recursively.
    fn resolve(&self, t: &Term) -> Term {
        match self.deref(t) {
            Term::Compound(f, args) => Term::Compound(f, args.iter().map(|a| self.resolve(a)).collect()),
            other => other,
        }
    }

    fn bind(&mut self, var: Arc<str>, value: Term) {
        self.trail.push(var.clone());
        self.bindings.insert(var, value);
    }

    fn undo_to(&mut self, len: usize) {
        while self.trail.len() > len {
            let v = self.trail.pop().expect("trail entry");
            self.bindings.remove(&v);
        }
    }

    fn occurs(&self, var: &str, t: &Term) -> bool {
        match self.deref(t) {
            Term::Var(v) => &*v == var,
            Term::Compound(_, args) => args.iter().any(|a| self.occurs(var, a)),
            _ => false,
        }
    }

    /// Unifies with occurs check, recording bindings on the trail. On
    /// failure, partial bindings are left for the caller to undo.
    fn unify(&mut self, a: &Term, b: &Term) -> bool {
        let mut stack = vec![(a.clone(), b.clone())];
        while let Some((x, y)) = stack.pop() {
            let x = self.deref(&x);
            let y = self.deref(&y);
            match (&x, &y) {
                (Term::Var(v), Term::Var(w)) if v == w => {}
                (Term::Var(v), t) | (t, Term::Var(v)) => {
                    if self.occurs(v, t) {
                        return false;
                    }
                    self.bind(v.clone(), t.clone());
                }
                (Term::Compound(f, xs), Term::Compound(g, ys)) => {
                    if f != g || xs.len() != ys.len() {
                        return false;
                    }
                    stack.extend(xs.iter().cloned().zip(ys.iter().cloned()).rev());
                }
                _ if x == y => {}
                _ => return false,
            }
        }
        true
    }

    fn rename(&mut self, t: &Term, suffix: u64) -> Term {
        t.map_vars(&mut |v| Term::var(format!("{v}#{suffix}")))
    }

    fn backtrack(&mut self) -> bool {
        loop {
            let Some(cp) = self.choices.pop() else {
                return false;
            };
            self.undo_to(cp.trail_len);
            match cp.alt {
                Alternative::Resume(cont) => {
                    self.goals = cont;
                    return true;
                }
                Alternative::Clauses { goal, candidates, next, cont } => {
                    if self.try_clauses(&goal, candidates, next, cont) {
                        return true;
                    }
                }
            }
        }
    }

    /// Resolves `goal` against candidate clauses starting at `start`,
    /// pushing a choicepoint when later candidates remain.
    fn try_clauses(&mut self, goal: &Term, candidates: Arc<[usize]>, start: usize, cont: Cont) -> bool {
        let barrier = self.choices.len();
        for pos in start..candidates.len() {
            let clause = self.theory.clause(candidates[pos]).clone();
            if !self.could_match(goal, &clause.head) {
                continue;
            }
            let depth = cont_len(&cont) + clause.body.len();
            if depth > self.limits.max_depth {
                self.depth_exceeded = true;
                continue;
            }
            // decided before unification binds the goal's arguments
            let more = (pos + 1..candidates.len())
                .any(|p| self.could_match(goal, &self.theory.clause(candidates[p]).head));
            let mark = self.trail.len();
            self.fresh += 1;
            let suffix = self.fresh;
            let head = self.rename(&clause.head, suffix);
            if !self.unify(goal, &head) {
                self.undo_to(mark);
                continue;
            }
            if more {
                self.choices.push(ChoicePoint {
                    alt: Alternative::Clauses {
                        goal: goal.clone(),
                        candidates: candidates.clone(),
                        next: pos + 1,
                        cont: cont.clone(),
                    },
                    trail_len: mark,
                });
            }
            let mut goals = cont;
            for body_goal in clause.body.iter().rev() {
                let term = self.rename(body_goal, suffix);
                goals = push(Goal::Call { term, cut: barrier }, goals);
            }
            self.goals = goals;
            return true;
        }
        false
    }

    /// Cheap first-argument pre-filter; never rejects a unifiable head.
    fn could_match(&self, goal: &Term, head: &Term) -> bool {
        let (Some(g), Some(h)) = (goal.args().first(), head.args().first()) else {
            return true;
        };
        let g = self.deref(g);
        match (&g, h) {
            (Term::Var(_), _) | (_, Term::Var(_)) => true,
            (Term::Compound(f, xs), Term::Compound(k, ys)) => f == k && xs.len() == ys.len(),
            (Term::Compound(..), _) | (_, Term::Compound(..)) => false,
            (a, b) => a == b,
        }
    }

    fn next_solution(&mut self) -> Option<Result<Solution, SolveError>> {
        if self.done {
            return None;
        }
        if self.interrupted {
            self.interrupted = false;
        } else if self.started && !self.backtrack() {
            self.done = true;
            return None;
        }
        self.started = true;
        loop {
            self.steps += 1;
            if self.steps.is_multiple_of(DEADLINE_POLL) {
                if let Some(deadline) = self.limits.deadline {
                    if Instant::now() >= deadline {
                        // the goal stack is untouched, so a later call resumes here
                        self.interrupted = true;
                        return Some(Err(SolveError::DeadlineExceeded));
                    }
                }
            }
            let Some(frame) = self.goals.take() else {
                self.produced += 1;
                return Some(Ok(self.current_solution()));
            };
            self.goals = frame.next.clone();
            let outcome = match &frame.goal {
                Goal::NegationFail(height) => {
                    self.choices.truncate(*height);
                    Ok(false)
                }
                Goal::Call { term, cut } => self.step(term, *cut),
            };
            match outcome {
                Ok(true) => {}
                Ok(false) => {
                    if !self.backtrack() {
                        self.done = true;
                        return None;
                    }
                }
                Err(SolveError::DeadlineExceeded) => unreachable!("deadline is checked above"),
                Err(e) => {
                    self.done = true;
                    return Some(Err(e));
                }
            }
        }
    }

    /// Executes one goal. `Ok(false)` means the goal failed.
    fn step(&mut self, term: &Term, cut: usize) -> Result<bool, SolveError> {
        let goal = self.deref(term);
        let (name, args): (&str, &[Term]) = match &goal {
            Term::Var(_) => return Err(SolveError::Instantiation),
            Term::Number(n) => return Err(SolveError::NotCallable(n.to_string())),
            Term::Atom(a) => (a, &[]),
            Term::Compound(f, args) => (f, args),
        };
        match (name, args.len()) {
            ("true", 0) => Ok(true),
            ("fail", 0) => Ok(false),
            ("!", 0) => {
                self.choices.truncate(cut);
                Ok(true)
            }
            (",", 2) => {
                let rest = self.goals.take();
                let rest = push(Goal::Call { term: args[1].clone(), cut }, rest);
                self.goals = push(Goal::Call { term: args[0].clone(), cut }, rest);
                Ok(true)
            }
            (";", 2) => {
                let rest = self.goals.take();
                let right = push(Goal::Call { term: args[1].clone(), cut }, rest.clone());
                self.choices.push(ChoicePoint { alt: Alternative::Resume(right), trail_len: self.trail.len() });
                self.goals = push(Goal::Call { term: args[0].clone(), cut }, rest);
                Ok(true)
            }
            ("\\+", 1) => {
                let height = self.choices.len();
                let rest = self.goals.take();
                self.choices.push(ChoicePoint { alt: Alternative::Resume(rest), trail_len: self.trail.len() });
                let inner = push(Goal::NegationFail(height), None);
                self.goals = push(Goal::Call { term: args[0].clone(), cut: height + 1 }, inner);
                Ok(true)
            }
            ("=", 2) => Ok(self.unify(&args[0], &args[1])),
            ("\\=", 2) => {
                let mark = self.trail.len();
                let unifiable = self.unify(&args[0], &args[1]);
                self.undo_to(mark);
                Ok(!unifiable)
            }
            ("is", 2) => {
                let value = arith::eval(&self.resolve(&args[1]))?;
                Ok(self.unify(&args[0], &Term::Number(value)))
            }
            (op, 2) if arith::compare_op(op).is_some() => {
                let test = arith::compare_op(op).expect("comparison");
                let lhs = arith::eval(&self.resolve(&args[0]))?;
                let rhs = arith::eval(&self.resolve(&args[1]))?;
                Ok(test(arith::compare(lhs, rhs)))
            }
            (name, arity) => {
                let Some(candidates) = self.theory.candidates(name, arity) else {
                    return match self.unknown {
                        UnknownPolicy::Error => Err(SolveError::UnknownPredicate { name: name.to_string(), arity }),
                        UnknownPolicy::Fail => Ok(false),
                    };
                };
                let cont = self.goals.take();
                Ok(self.try_clauses(&goal, candidates, 0, cont))
            }
        }
    }

    fn current_solution(&self) -> Solution {
        let mut renames: HashMap<Arc<str>, Term> = HashMap::new();
        // a query variable bound only to a fresh variable stays unbound and names it
        let mut unbound = Vec::new();
        for v in &self.query_vars {
            if let Term::Var(w) = self.deref(&Term::Var(v.clone())) {
                if w.contains('#') && !renames.contains_key(&w) {
                    renames.insert(w, Term::Var(v.clone()));
                    unbound.push(v.clone());
                } else if w == *v {
                    unbound.push(v.clone());
                }
            }
        }
        let mut counter = 0usize;
        let mut tidy = |t: Term| {
            t.map_vars(&mut |v| {
                if !v.contains('#') {
                    return Term::Var(v.clone());
                }
                renames
                    .entry(v.clone())
                    .or_insert_with(|| {
                        let name = format!("_G{counter}");
                        counter += 1;
                        Term::var(name)
                    })
                    .clone()
            })
        };
        let mut pairs = Vec::new();
        for v in &self.query_vars {
            if !unbound.contains(v) {
                pairs.push((v.clone(), tidy(self.resolve(&Term::Var(v.clone())))));
            }
        }
        let solved_goal = tidy(self.resolve(&self.query));
        Solution { success: true, bindings: pairs.into_iter().collect(), solved_goal }
    }
}

impl Iterator for Solutions {
    type Item = Result<Solution, SolveError>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_solution()
    }
}
