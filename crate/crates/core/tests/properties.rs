use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use lpaas_core::logic::{
    is_variant, parse_term, parse_theory, solve_iter, unify, Clause, ResolutionLimits, SolveError, Substitution,
    Term, Theory,
};
use proptest::prelude::*;

fn small_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["a", "b", "c"]).prop_map(Term::atom),
        (0i64..4).prop_map(Term::int),
        prop::sample::select(vec!["X", "Y", "Z", "W"]).prop_map(Term::var),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        (prop::sample::select(vec![("f", 1usize), ("g", 2), ("h", 3)]), prop::collection::vec(inner, 3))
            .prop_map(|((f, n), mut args)| {
                args.truncate(n);
                Term::compound(f, args)
            })
    })
}

fn ground_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![prop::sample::select(vec!["a", "b"]).prop_map(Term::atom), (0i64..3).prop_map(Term::int)];
    leaf.prop_recursive(3, 16, 2, |inner| {
        (prop::sample::select(vec![("f", 1usize), ("g", 2)]), prop::collection::vec(inner, 2)).prop_map(
            |((f, n), mut args)| {
                args.truncate(n);
                Term::compound(f, args)
            },
        )
    })
}

/// Replaces random subterms of `t` by fresh variables `{prefix}{n}`, recording
/// what each variable stood for.
fn abstract_term(t: &Term, picks: &mut impl Iterator<Item = bool>, prefix: &str, theta: &mut BTreeMap<String, Term>) -> Term {
    if picks.next().unwrap_or(false) {
        let name = format!("{prefix}{}", theta.len());
        theta.insert(name.clone(), t.clone());
        return Term::var(name);
    }
    match t {
        Term::Compound(f, args) => {
            Term::compound(&**f, args.iter().map(|a| abstract_term(a, picks, prefix, theta)).collect())
        }
        other => other.clone(),
    }
}

fn sub(map: &BTreeMap<String, Term>) -> Substitution {
    map.iter().map(|(k, v)| (Arc::from(k.as_str()), v.clone())).collect()
}

fn display_term() -> impl Strategy<Value = Term> {
    let atoms = vec![
        "a", "foo", "[]", "{}", "hello world", "+", "-", "is", ",", "|", "\\+", "mod", "Abc", "don't", "", "!", ";",
        "[", "a\nb", "_x",
    ];
    let leaf = prop_oneof![
        prop::sample::select(atoms).prop_map(Term::atom),
        any::<i32>().prop_map(|i| Term::int(i64::from(i))),
        prop::sample::select(vec![0.5, -0.25, 1.0e10, 3.0, -2.0e-7, 123.456]).prop_map(Term::float),
        prop::sample::select(vec!["X", "Y", "_A", "Long_Name"]).prop_map(Term::var),
    ];
    let functors: Vec<(&str, usize)> = vec![
        ("f", 1), ("g", 2), ("+", 2), ("-", 1), ("-", 2), ("*", 2), ("^", 2), ("**", 2), (",", 2), (";", 2),
        ("->", 2), (":-", 2), (":-", 1), ("\\+", 1), ("=", 2), ("is", 2), ("mod", 2), ("<", 2), ("\\", 1),
        ("hello world", 1), ("[]", 2), ("{}", 1), ("+", 1),
    ];
    leaf.prop_recursive(4, 32, 3, move |inner| {
        prop_oneof![
            (prop::sample::select(functors.clone()), prop::collection::vec(inner.clone(), 3)).prop_map(
                |((f, n), mut args)| {
                    args.truncate(n);
                    Term::compound(f, args)
                }
            ),
            (prop::collection::vec(inner.clone(), 0..4), prop_oneof![Just(Term::nil()), inner])
                .prop_map(|(items, tail)| Term::list(items, tail)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn mgu_is_a_unifier(a in small_term(), b in small_term()) {
        if let Some(s) = unify(&a, &b, &Substitution::new()) {
            prop_assert_eq!(s.apply(&a), s.apply(&b));
            // idempotent
            prop_assert_eq!(s.apply(&s.apply(&a)), s.apply(&a));
        }
    }

    #[test]
    fn mgu_is_most_general(t in ground_term(), picks_a in prop::collection::vec(prop::bool::weighted(0.3), 32),
                           picks_b in prop::collection::vec(prop::bool::weighted(0.3), 32)) {
        let mut theta = BTreeMap::new();
        let a = abstract_term(&t, &mut picks_a.into_iter(), "A", &mut theta);
        let b = abstract_term(&t, &mut picks_b.into_iter(), "B", &mut theta);
        let theta = sub(&theta);
        prop_assert_eq!(theta.apply(&a), theta.apply(&b));
        let s = unify(&a, &b, &Substitution::new());
        prop_assert!(s.is_some(), "{} and {} have a common instance", a, b);
        let s = s.unwrap();
        // theta factors through the mgu: theta = theta . s on the variables involved
        for v in a.variables().into_iter().chain(b.variables()) {
            let var = Term::Var(v);
            prop_assert_eq!(theta.apply(&s.apply(&var)), theta.apply(&var));
        }
    }

    #[test]
    fn engine_agrees_with_reference_unifier(a in small_term(), b in small_term()) {
        let goal = Term::compound("=", vec![a.clone(), b.clone()]);
        let answers: Vec<_> = solve_iter(Arc::new(Theory::default()), goal.clone(), ResolutionLimits::default())
            .collect::<Result<_, _>>()
            .unwrap();
        match unify(&a, &b, &Substitution::new()) {
            None => prop_assert!(answers.is_empty()),
            Some(s) => {
                prop_assert_eq!(answers.len(), 1);
                prop_assert!(is_variant(&answers[0].solved_goal, &s.apply(&goal)),
                    "{} vs {}", answers[0].solved_goal, s.apply(&goal));
            }
        }
    }

    #[test]
    fn facts_are_tried_in_textual_order(facts in prop::collection::vec(small_term(), 1..12), q in small_term()) {
        let clauses: Vec<Clause> = facts.iter().map(|f| Clause::fact(Term::compound("p", vec![f.clone()]))).collect();
        let theory = Arc::new(Theory::from_clauses(clauses));
        let goal = Term::compound("p", vec![q.clone()]);
        let got: Vec<Term> = solve_iter(theory, goal.clone(), ResolutionLimits::default())
            .map(|r| r.unwrap().solved_goal)
            .collect();
        // each fact renamed apart from the query, then unified on its own
        let expected: Vec<Term> = facts
            .iter()
            .filter_map(|f| {
                let f = f.map_vars(&mut |v| Term::var(format!("{v}'")));
                let head = Term::compound("p", vec![f]);
                unify(&goal, &head, &Substitution::new()).map(|s| s.apply(&goal))
            })
            .collect();
        prop_assert_eq!(got.len(), expected.len());
        for (g, e) in got.iter().zip(&expected) {
            prop_assert!(is_variant(g, e), "{} vs {}", g, e);
        }
    }

    #[test]
    fn write_then_parse_is_identity(t in display_term()) {
        let text = t.to_string();
        let back = parse_term(&text);
        prop_assert!(back.is_ok(), "{:?} from {}", back, text);
        let back = back.unwrap();
        prop_assert_eq!(&back, &t, "{}", text);
        prop_assert_eq!(back.to_string(), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn deadline_yields_a_prefix(budget_us in 0u64..3000) {
        let theory = Arc::new(Theory::from_clauses(
            parse_theory("b(0). b(1). w([]). w([H|T]) :- b(H), w(T).").unwrap(),
        ));
        let goal = parse_term("w([A,B,C,D,E,F,G,H])").unwrap();
        let full: Vec<_> = solve_iter(theory.clone(), goal.clone(), ResolutionLimits::default())
            .map(Result::unwrap)
            .collect();
        let limits = ResolutionLimits::with_deadline(Instant::now() + Duration::from_micros(budget_us));
        let mut partial = Vec::new();
        for r in solve_iter(theory, goal, limits) {
            match r {
                Ok(s) => partial.push(s),
                Err(e) => {
                    prop_assert_eq!(e, SolveError::DeadlineExceeded);
                    break;
                }
            }
        }
        prop_assert!(partial.len() <= full.len());
        prop_assert_eq!(&full[..partial.len()], &partial[..]);
    }
}
