//! The fixed builtin set and a one-shot evaluator for builtin goals.

use std::sync::Arc;

use super::engine::{ResolutionLimits, SolveError, Solutions, UnknownPolicy};
use super::term::Term;
use super::theory::Theory;
use super::unify::Substitution;

/// Control constructs and builtins understood by the engine.
pub const BUILTINS: &[(&str, usize)] = &[
    ("true", 0),
    ("fail", 0),
    ("!", 0),
    (",", 2),
    (";", 2),
    ("=", 2),
    ("\\=", 2),
    ("is", 2),
    ("=:=", 2),
    ("=\\=", 2),
    ("<", 2),
    (">", 2),
    ("=<", 2),
    (">=", 2),
    ("\\+", 1),
];

pub fn is_builtin(name: &str, arity: usize) -> bool {
    BUILTINS.iter().any(|&(n, a)| n == name && a == arity)
}

#[derive(Debug, Clone, PartialEq)]
pub enum BuiltinOutcome {
    /// One extended substitution per solution, in order.
    Solutions(Vec<Substitution>),
    Failure,
    NotBuiltin,
}

/// Evaluates `goal` under `s` when it is a builtin. Subgoals reached through
/// control constructs (`,`, `;`, `\+`) are resolved against `theory`.
pub fn eval_builtin(theory: &Arc<Theory>, goal: &Term, s: &Substitution) -> Result<BuiltinOutcome, SolveError> {
    let goal = s.apply(goal);
    let Some((name, arity)) = goal.functor() else {
        return Ok(BuiltinOutcome::NotBuiltin);
    };
    if !is_builtin(name, arity) {
        return Ok(BuiltinOutcome::NotBuiltin);
    }
    let mut out = Vec::new();
    for solution in Solutions::new(theory.clone(), goal, ResolutionLimits::default(), UnknownPolicy::Error) {
        out.push(s.compose(&solution?.bindings));
    }
    Ok(if out.is_empty() { BuiltinOutcome::Failure } else { BuiltinOutcome::Solutions(out) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_term, parse_theory};

    fn theory(src: &str) -> Arc<Theory> {
        Arc::new(Theory::from_clauses(parse_theory(src).unwrap()))
    }

    #[test]
    fn is_binds_sum() {
        let out = eval_builtin(&theory(""), &parse_term("is(X, '+'(2,3))").unwrap(), &Substitution::new()).unwrap();
        let BuiltinOutcome::Solutions(sols) = out else { panic!("{out:?}") };
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0].get("X"), Some(&Term::int(5)));
    }

    #[test]
    fn negation_as_failure() {
        let out = eval_builtin(&theory("p(2)."), &parse_term("'\\\\+'(p(1))").unwrap(), &Substitution::new()).unwrap();
        assert_eq!(out, BuiltinOutcome::Solutions(vec![Substitution::new()]));
        let out = eval_builtin(&theory("p(2)."), &parse_term("\\+ p(2)").unwrap(), &Substitution::new()).unwrap();
        assert_eq!(out, BuiltinOutcome::Failure);
    }

    #[test]
    fn comparison_type_error() {
        let err = eval_builtin(&theory(""), &parse_term("'=:='(1, a)").unwrap(), &Substitution::new()).unwrap_err();
        assert!(matches!(err, SolveError::Arithmetic(_)));
    }

    #[test]
    fn user_predicates_are_not_builtins() {
        let out = eval_builtin(&theory("p(1)."), &parse_term("p(X)").unwrap(), &Substitution::new()).unwrap();
        assert_eq!(out, BuiltinOutcome::NotBuiltin);
    }

    #[test]
    fn respects_incoming_substitution() {
        let s: Substitution = [(Arc::from("Y"), Term::int(4))].into_iter().collect();
        let out = eval_builtin(&theory(""), &parse_term("X is Y * 2").unwrap(), &s).unwrap();
        let BuiltinOutcome::Solutions(sols) = out else { panic!() };
        assert_eq!(sols[0].get("X"), Some(&Term::int(8)));
        assert_eq!(sols[0].get("Y"), Some(&Term::int(4)));
    }
}
