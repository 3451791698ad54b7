//! Differential check against answers frozen from a reference Prolog.
//! Each `*.pl` file lists its queries in `% query:` lines; the matching
//! `*.expected` file holds, per query, the list of solved goals produced by
//! `findall(Q, Q, L)` in the reference system.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use lpaas_core::logic::{is_variant, parse_term, parse_theory, solve_iter, ResolutionLimits, Term, Theory};

fn list_items(mut t: Term) -> Vec<Term> {
    let mut out = Vec::new();
    while let Term::Compound(f, args) = &t {
        assert!(&**f == "." && args.len() == 2, "not a list: {t}");
        out.push(args[0].clone());
        t = args[1].clone();
    }
    assert_eq!(t, Term::nil());
    out
}

#[test]
fn corpus_matches_reference_answers() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus");
    let mut programs = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_none_or(|e| e != "pl") {
            continue;
        }
        programs += 1;
        let text = fs::read_to_string(&path).unwrap();
        let expected = fs::read_to_string(path.with_extension("expected")).unwrap();
        let theory = Arc::new(Theory::from_clauses(parse_theory(&text).unwrap()));
        assert!(theory.len() <= 50, "{path:?}");
        let queries: Vec<&str> = text.lines().filter_map(|l| l.strip_prefix("% query:")).map(str::trim).collect();
        assert_eq!(queries.len(), expected.lines().count(), "{path:?}");
        for (query, line) in queries.into_iter().zip(expected.lines()) {
            let want = list_items(parse_term(line).unwrap());
            let got: Vec<Term> = solve_iter(theory.clone(), parse_term(query).unwrap(), ResolutionLimits::default())
                .map(|r| r.unwrap_or_else(|e| panic!("{path:?} {query}: {e}")).solved_goal)
                .collect();
            assert_eq!(got.len(), want.len(), "{path:?} {query}");
            for (g, w) in got.iter().zip(&want) {
                assert!(is_variant(g, w), "{path:?} {query}: got {g}, want {w}");
            }
        }
    }
    assert!(programs >= 20);
}
