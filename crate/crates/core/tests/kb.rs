use std::sync::Arc;

use lpaas_core::clock::Timestamp;
use lpaas_core::kb::{Origin, TemporalKb, TimedClause, ValidityInterval};
use lpaas_core::logic::{Clause, Term};
use proptest::prelude::*;

fn timed_clause(i: usize) -> impl Strategy<Value = TimedClause> {
    (0u64..1000, prop::option::of(1u64..500), any::<bool>()).prop_map(move |(from, len, sensor)| TimedClause {
        clause: Arc::new(Clause::fact(Term::compound("c", vec![Term::int(i as i64)]))),
        validity: ValidityInterval { from: Timestamp(from), to: len.map(|l| Timestamp(from + l)) },
        origin: if sensor { Origin::Sensor } else { Origin::Configurator },
    })
}

fn random_kb() -> impl Strategy<Value = Vec<TimedClause>> {
    (0usize..=100).prop_flat_map(|n| (0..n).map(timed_clause).collect::<Vec<_>>())
}

#[derive(Debug, Clone)]
enum Mutation {
    SetTheory(Vec<i64>, u64),
    Ingest(i64, Option<u64>, u64),
    Prune(u64),
}

fn mutation() -> impl Strategy<Value = Mutation> {
    prop_oneof![
        (prop::collection::vec(0i64..5, 0..4), 0u64..2000).prop_map(|(v, t)| Mutation::SetTheory(v, t)),
        (0i64..5, prop::option::of(1u64..300), 0u64..2000).prop_map(|(v, l, t)| Mutation::Ingest(v, l, t)),
        (0u64..2000).prop_map(Mutation::Prune),
    ]
}

fn fact(name: &str, v: i64) -> Clause {
    Clause::fact(Term::compound(name, vec![Term::int(v)]))
}

fn apply(kb: &TemporalKb, m: &Mutation) {
    match m {
        Mutation::SetTheory(vs, t) => kb.set_theory(vs.iter().map(|&v| fact("p", v)).collect(), Timestamp(*t)),
        Mutation::Ingest(v, lease, t) => kb.ingest_fact(fact("s", *v), *lease, Timestamp(*t)).unwrap(),
        Mutation::Prune(t) => {
            kb.prune(Timestamp(*t));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn snapshot_matches_brute_force_filter(entries in random_kb(), probe in 0u64..1600, pick in any::<prop::sample::Index>()) {
        let kb = TemporalKb::from_entries(entries.clone(), true);
        // probe a random instant and, when there are entries, both endpoints of one of them
        let mut instants = vec![Timestamp(probe)];
        if !entries.is_empty() {
            let e = &entries[pick.index(entries.len())];
            instants.push(e.validity.from);
            instants.extend(e.validity.to);
        }
        for at in instants {
            let expected: Vec<_> = entries
                .iter()
                .filter(|e| e.validity.from <= at && e.validity.to.is_none_or(|to| at < to))
                .map(|e| e.clause.clone())
                .collect();
            prop_assert_eq!(kb.snapshot_at(at).clauses().to_vec(), expected);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn snapshots_are_immutable(ops in prop::collection::vec((mutation(), 0u64..2000), 1..30)) {
        let kb = TemporalKb::new(true);
        let mut taken = Vec::new();
        for (m, probe) in &ops {
            let s = kb.snapshot_at(Timestamp(*probe));
            taken.push((s.clone(), s.clauses().to_vec()));
            apply(&kb, m);
        }
        for (s, original) in taken {
            prop_assert_eq!(s.clauses(), &original[..]);
        }
    }

    #[test]
    fn set_theory_is_idempotent_on_later_snapshots(ops in prop::collection::vec(mutation(), 0..10),
                                                   theory in prop::collection::vec(0i64..5, 0..5),
                                                   later in 0u64..500) {
        let kb = TemporalKb::new(true);
        for m in &ops {
            apply(&kb, m);
        }
        let now = Timestamp(2000);
        let clauses: Vec<_> = theory.iter().map(|&v| fact("p", v)).collect();
        kb.set_theory(clauses.clone(), now);
        let at = now.plus_millis(later);
        let once = kb.snapshot_at(at);
        kb.set_theory(clauses, now);
        prop_assert_eq!(kb.snapshot_at(at).clauses().to_vec(), once.clauses().to_vec());
    }

    #[test]
    fn intervals_stay_well_formed(ops in prop::collection::vec(mutation(), 0..40)) {
        let kb = TemporalKb::new(true);
        for m in &ops {
            apply(&kb, m);
        }
        for e in kb.entries() {
            prop_assert!(e.validity.to.is_none_or(|to| e.validity.from < to));
        }
    }
}
