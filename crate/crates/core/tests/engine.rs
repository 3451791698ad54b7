use std::sync::Arc;
use std::time::{Duration, Instant};

use lpaas_core::logic::{
    parse_term, parse_theory, solve_iter, ResolutionLimits, Solution, SolveError, Solutions, Term, Theory,
    UnknownPolicy,
};

fn theory(src: &str) -> Arc<Theory> {
    Arc::new(Theory::from_clauses(parse_theory(src).unwrap()))
}

fn all(src: &str, goal: &str) -> Vec<Solution> {
    solve_iter(theory(src), parse_term(goal).unwrap(), ResolutionLimits::default())
        .collect::<Result<Vec<_>, _>>()
        .unwrap()
}

fn binding(s: &Solution, var: &str) -> String {
    s.bindings.get(var).map(ToString::to_string).unwrap_or_default()
}

#[test]
fn facts_enumerate_in_textual_order() {
    let sols = all("p(1). p(2). p(3).", "p(X)");
    let xs: Vec<_> = sols.iter().map(|s| binding(s, "X")).collect();
    assert_eq!(xs, ["1", "2", "3"]);
}

#[test]
fn grandparent_single_solution() {
    let sols = all(
        "parent(abraham,isaac). parent(isaac,jacob). gp(X,Z):-parent(X,Y),parent(Y,Z).",
        "gp(abraham,W)",
    );
    assert_eq!(sols.len(), 1);
    assert_eq!(binding(&sols[0], "W"), "jacob");
    assert_eq!(sols[0].solved_goal.to_string(), "gp(abraham,jacob)");
}

#[test]
fn tail_recursive_loop_hits_deadline() {
    let start = Instant::now();
    let mut it = solve_iter(
        theory("loop :- loop."),
        parse_term("loop").unwrap(),
        ResolutionLimits::with_deadline(start + Duration::from_millis(50)),
    );
    assert_eq!(it.next(), Some(Err(SolveError::DeadlineExceeded)));
    assert_eq!(it.produced(), 0);
    assert!(start.elapsed() < Duration::from_millis(500));
}

#[test]
fn growing_resolvent_is_pruned_not_an_error() {
    let mut it = solve_iter(
        theory("nat(0). nat(N) :- nat(M), N is M + 1."),
        parse_term("nat(X), X < 0").unwrap(),
        ResolutionLimits { max_depth: 50, deadline: None },
    );
    assert_eq!(it.next(), None);
    assert!(it.depth_exceeded());
}

#[test]
fn cut_is_local_to_clause_body() {
    let src = "
        first(X) :- mem(X, [a,b,c]), !.
        mem(X, [X|_]).
        mem(X, [_|T]) :- mem(X, T).
        both(X, Y) :- first(X), mem(Y, [1,2]).
    ";
    let sols = all(src, "first(X)");
    assert_eq!(sols.len(), 1);
    let sols = all(src, "both(X, Y)");
    let pairs: Vec<_> = sols.iter().map(|s| (binding(s, "X"), binding(s, "Y"))).collect();
    assert_eq!(pairs, [("a".into(), "1".into()), ("a".into(), "2".into())]);
}

#[test]
fn cut_inside_negation_does_not_escape() {
    let sols = all("p(1). p(2). q(X) :- p(X), \\+ (p(Y), !, Y > 1).", "q(X)");
    assert_eq!(sols.len(), 2);
}

#[test]
fn cut_through_disjunction_is_transparent() {
    let sols = all("t(X) :- (X = 1 ; X = 2), !. t(3).", "t(X)");
    assert_eq!(sols.len(), 1);
    assert_eq!(binding(&sols[0], "X"), "1");
}

#[test]
fn unknown_predicate_policy() {
    let mut it = solve_iter(theory("p(1)."), parse_term("q(X)").unwrap(), ResolutionLimits::default());
    assert_eq!(it.next(), Some(Err(SolveError::UnknownPredicate { name: "q".into(), arity: 1 })));
    assert_eq!(it.next(), None);
    let mut it = Solutions::new(theory("p(1)."), parse_term("q(X)").unwrap(), ResolutionLimits::default(), UnknownPolicy::Fail);
    assert_eq!(it.next(), None);
}

#[test]
fn defined_predicate_without_match_just_fails() {
    assert!(all("p(1).", "p(2)").is_empty());
}

#[test]
fn arithmetic_errors_surface() {
    let mut it = solve_iter(theory(""), parse_term("X is foo + 1").unwrap(), ResolutionLimits::default());
    assert!(matches!(it.next(), Some(Err(SolveError::Arithmetic(_)))));
    let mut it = solve_iter(theory(""), parse_term("X > 1").unwrap(), ResolutionLimits::default());
    assert_eq!(it.next(), Some(Err(SolveError::Instantiation)));
}

#[test]
fn projection_hides_anonymous_and_unbound_variables() {
    let sols = all("p(1, a). p(2, b).", "p(X, _)");
    assert_eq!(sols[0].bindings.len(), 1);
    let sols = all("q(_).", "q(X)");
    assert!(sols[0].bindings.is_empty());
}

#[test]
fn fresh_variables_are_tidied_in_answers() {
    let sols = all("pair(f(A, B), A, B).", "pair(T, X, Y)");
    assert_eq!(sols[0].bindings.get("T"), Some(&parse_term("f(X, Y)").unwrap()));
    let sols = all("mk(g(_, _)).", "mk(T)");
    assert_eq!(sols[0].solved_goal.to_string(), "mk(g(_G0,_G1))");
}

#[test]
fn renamed_clause_uses_share_no_variables() {
    // the same clause used twice in one derivation must not alias
    let sols = all("same(X, X). two(A, B) :- same(A, 1), same(B, 2).", "two(P, Q)");
    assert_eq!(sols.len(), 1);
    assert_eq!(binding(&sols[0], "P"), "1");
    assert_eq!(binding(&sols[0], "Q"), "2");
}

#[test]
fn cursor_is_resumable_and_reports_determinism() {
    let mut it = solve_iter(theory("p(1). p(2)."), parse_term("p(X)").unwrap(), ResolutionLimits::default());
    assert!(it.may_have_more());
    let first = it.next().unwrap().unwrap();
    assert_eq!(binding(&first, "X"), "1");
    assert!(it.may_have_more());
    let second = it.next().unwrap().unwrap();
    assert_eq!(binding(&second, "X"), "2");
    assert!(!it.may_have_more());
    assert!(it.next().is_none());
    assert!(it.is_exhausted());
}

#[test]
fn deadline_interruption_resumes_where_it_stopped() {
    // 2^10 leaves; a tiny budget interrupts mid-search and a later call continues
    let src = "b(0). b(1). w([]). w([H|T]) :- b(H), w(T).";
    let goal = parse_term("w([A,B,C,D,E,F,G,H,I,J])").unwrap();
    let full: Vec<_> = solve_iter(theory(src), goal.clone(), ResolutionLimits::default())
        .map(Result::unwrap)
        .collect();
    let mut it = solve_iter(theory(src), goal, ResolutionLimits::with_deadline(Instant::now()));
    let mut got = Vec::new();
    let mut interruptions = 0;
    while let Some(r) = it.next() {
        match r {
            Ok(s) => got.push(s),
            Err(SolveError::DeadlineExceeded) => {
                interruptions += 1;
                it.set_deadline(Some(Instant::now() + Duration::from_micros(50)));
            }
            Err(e) => panic!("{e}"),
        }
    }
    assert!(interruptions > 0);
    assert_eq!(got, full);
}

#[test]
fn variable_goal_is_called() {
    let sols = all("p(1).", "G = p(X), G");
    assert_eq!(binding(&sols[0], "X"), "1");
    let mut it = solve_iter(theory(""), parse_term("G").unwrap(), ResolutionLimits::default());
    assert_eq!(it.next(), Some(Err(SolveError::Instantiation)));
}

#[test]
fn negation_as_failure_example() {
    let sols = all("p(2).", "\\+ p(1)");
    assert_eq!(sols.len(), 1);
    assert!(sols[0].bindings.is_empty());
    assert_eq!(sols[0].solved_goal, parse_term("\\+ p(1)").unwrap());
}

#[test]
fn occurs_check_in_resolution() {
    assert!(all("", "X = f(X)").is_empty());
    assert_eq!(all("", "X = f(Y)")[0].bindings.get("X"), Some(&Term::compound("f", vec![Term::var("Y")])));
}
