//! Interval-tagged clause store.
//!
//! Every clause carries a validity interval `[from, to)`; an open `to` means
//! the clause holds until further notice. A [`Snapshot`] at time `t` is the
//! theory made of the clauses valid at `t`, in insertion order. Snapshots own
//! their clauses, so later mutations of the store never reach them.

use std::sync::Arc;

use parking_lot::RwLock;
use serde::{Deserialize, Serialize};

use crate::clock::Timestamp;
use crate::logic::{Clause, Theory};

/// Left-closed, right-open validity; `to: None` is unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityInterval {
    pub from: Timestamp,
    pub to: Option<Timestamp>,
}

impl ValidityInterval {
    /// `None` unless `from < to`.
    pub fn new(from: Timestamp, to: Option<Timestamp>) -> Option<Self> {
        match to {
            Some(to) if to <= from => None,
            _ => Some(ValidityInterval { from, to }),
        }
    }

    pub fn open(from: Timestamp) -> Self {
        ValidityInterval { from, to: None }
    }

    pub fn contains(&self, t: Timestamp) -> bool {
        self.from <= t && self.to.is_none_or(|to| t < to)
    }

    pub fn ended_by(&self, t: Timestamp) -> bool {
        self.to.is_some_and(|to| to <= t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Configurator,
    Sensor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimedClause {
    pub clause: Arc<Clause>,
    pub validity: ValidityInterval,
    pub origin: Origin,
}

/// The theory holding at one instant.
#[derive(Debug, Clone)]
pub struct Snapshot {
    at: Timestamp,
    theory: Arc<Theory>,
}

impl Snapshot {
    pub fn at(&self) -> Timestamp {
        self.at
    }

    pub fn clauses(&self) -> &[Arc<Clause>] {
        self.theory.clauses()
    }

    pub fn theory(&self) -> &Arc<Theory> {
        &self.theory
    }
}

impl PartialEq for Snapshot {
    fn eq(&self, other: &Self) -> bool {
        self.at == other.at && self.theory == other.theory
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum KbError {
    #[error("the knowledge base is static; sensor facts are not accepted")]
    StaticKb,
    #[error("only facts (clauses with an empty body) can be ingested")]
    NonFact,
    #[error("lease must be a positive number of milliseconds")]
    InvalidLease,
}

#[derive(Debug, Default)]
struct Store {
    entries: Vec<TimedClause>,
    dynamic: bool,
}

impl Store {
    /// Ends every matching entry that is open at `now`; entries that would
    /// become empty are dropped.
    fn close_where(&mut self, now: Timestamp, mut pred: impl FnMut(&TimedClause) -> bool) {
        self.entries.retain_mut(|e| {
            if !pred(e) || e.validity.ended_by(now) {
                return true;
            }
            if e.validity.from >= now {
                return false;
            }
            e.validity.to = Some(now);
            true
        });
    }
}

/// Single-writer, multi-reader clause store.
#[derive(Debug, Default)]
pub struct TemporalKb {
    store: RwLock<Store>,
}

impl TemporalKb {
    pub fn new(dynamic: bool) -> Self {
        TemporalKb { store: RwLock::new(Store { entries: Vec::new(), dynamic }) }
    }

    /// Builds a store from existing entries, kept in the given order.
    pub fn from_entries(entries: Vec<TimedClause>, dynamic: bool) -> Self {
        TemporalKb { store: RwLock::new(Store { entries, dynamic }) }
    }

    pub fn is_dynamic(&self) -> bool {
        self.store.read().dynamic
    }

    /// Switches between static and dynamic mode. Leaving dynamic mode ends
    /// all sensor facts at `now`.
    pub fn set_dynamic(&self, dynamic: bool, now: Timestamp) {
        let mut store = self.store.write();
        if store.dynamic && !dynamic {
            store.close_where(now, |e| e.origin == Origin::Sensor);
        }
        store.dynamic = dynamic;
    }

    /// Replaces the configurator theory from `now` on. Sensor facts are kept.
    pub fn set_theory(&self, clauses: Vec<Clause>, now: Timestamp) {
        let mut store = self.store.write();
        store.close_where(now, |e| e.origin == Origin::Configurator);
        store.entries.extend(clauses.into_iter().map(|c| TimedClause {
            clause: Arc::new(c),
            validity: ValidityInterval::open(now),
            origin: Origin::Configurator,
        }));
    }

    /// Clauses valid at `at`, with their intervals.
    pub fn get_theory(&self, at: Timestamp) -> Vec<TimedClause> {
        self.store.read().entries.iter().filter(|e| e.validity.contains(at)).cloned().collect()
    }

    /// Records a perceived fact valid for `lease_ms` (or indefinitely). An
    /// identical ground sensor fact still valid at `now` is ended first.
    pub fn ingest_fact(&self, fact: Clause, lease_ms: Option<u64>, now: Timestamp) -> Result<(), KbError> {
        if !fact.is_fact() {
            return Err(KbError::NonFact);
        }
        if lease_ms == Some(0) {
            return Err(KbError::InvalidLease);
        }
        let mut store = self.store.write();
        if !store.dynamic {
            return Err(KbError::StaticKb);
        }
        if fact.head.is_ground() {
            store.close_where(now, |e| e.origin == Origin::Sensor && *e.clause == fact && e.validity.contains(now));
        }
        let to = lease_ms.map(|ms| now.plus_millis(ms));
        store.entries.push(TimedClause {
            clause: Arc::new(fact),
            validity: ValidityInterval { from: now, to },
            origin: Origin::Sensor,
        });
        Ok(())
    }

    pub fn snapshot_at(&self, at: Timestamp) -> Snapshot {
        let clauses: Vec<Arc<Clause>> = self
            .store
            .read()
            .entries
            .iter()
            .filter(|e| e.validity.contains(at))
            .map(|e| e.clause.clone())
            .collect();
        Snapshot { at, theory: Arc::new(Theory::new(clauses)) }
    }

    /// Drops clauses whose validity ended at or before `before`.
    pub fn prune(&self, before: Timestamp) -> usize {
        let mut store = self.store.write();
        let len = store.entries.len();
        store.entries.retain(|e| !e.validity.ended_by(before));
        len - store.entries.len()
    }

    /// All entries, including ended ones, in insertion order.
    pub fn entries(&self) -> Vec<TimedClause> {
        self.store.read().entries.clone()
    }

    /// Configurator entries only, the durable part of the store.
    pub fn configurator_entries(&self) -> Vec<TimedClause> {
        self.store.read().entries.iter().filter(|e| e.origin == Origin::Configurator).cloned().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_clause;

    fn c(text: &str) -> Clause {
        parse_clause(text).unwrap()
    }

    fn heads(s: &Snapshot) -> Vec<String> {
        s.clauses().iter().map(|c| c.head.to_string()).collect()
    }

    fn t(ms: u64) -> Timestamp {
        Timestamp(ms)
    }

    #[test]
    fn set_theory_replaces_from_now() {
        let kb = TemporalKb::new(false);
        kb.set_theory(vec![c("p(1).")], t(100));
        assert_eq!(heads(&kb.snapshot_at(t(100))), ["p(1)"]);
        assert!(kb.snapshot_at(t(99)).clauses().is_empty());
        kb.set_theory(vec![c("q(2).")], t(200));
        assert_eq!(heads(&kb.snapshot_at(t(150))), ["p(1)"]);
        assert_eq!(heads(&kb.snapshot_at(t(200))), ["q(2)"]);
        kb.set_theory(vec![], t(300));
        assert!(kb.snapshot_at(t(300)).clauses().is_empty());
    }

    #[test]
    fn replacing_at_the_same_instant_leaves_no_empty_interval() {
        let kb = TemporalKb::new(false);
        kb.set_theory(vec![c("p(1).")], t(100));
        kb.set_theory(vec![c("p(2).")], t(100));
        assert_eq!(kb.entries().len(), 1);
        assert_eq!(heads(&kb.snapshot_at(t(100))), ["p(2)"]);
    }

    #[test]
    fn get_theory_is_right_exclusive() {
        let kb = TemporalKb::new(true);
        kb.ingest_fact(c("p(1)."), Some(100), t(100)).unwrap();
        assert_eq!(kb.get_theory(t(150)).len(), 1);
        assert_eq!(kb.get_theory(t(150))[0].validity, ValidityInterval { from: t(100), to: Some(t(200)) });
        assert!(kb.get_theory(t(200)).is_empty());
    }

    #[test]
    fn lease_expires() {
        let kb = TemporalKb::new(true);
        kb.ingest_fact(c("temp(20)."), Some(60_000), t(100)).unwrap();
        assert_eq!(heads(&kb.snapshot_at(t(100))), ["temp(20)"]);
        assert_eq!(heads(&kb.snapshot_at(t(60_099))), ["temp(20)"]);
        assert!(kb.snapshot_at(t(60_100)).clauses().is_empty());
    }

    #[test]
    fn distinct_facts_coexist_identical_ones_supersede() {
        let kb = TemporalKb::new(true);
        kb.ingest_fact(c("temp(20)."), None, t(100)).unwrap();
        kb.ingest_fact(c("temp(21)."), None, t(200)).unwrap();
        assert_eq!(heads(&kb.snapshot_at(t(250))), ["temp(20)", "temp(21)"]);
        kb.ingest_fact(c("temp(20)."), Some(50), t(300)).unwrap();
        assert_eq!(heads(&kb.snapshot_at(t(320))), ["temp(21)", "temp(20)"]);
        assert_eq!(heads(&kb.snapshot_at(t(350))), ["temp(21)"]);
        assert_eq!(heads(&kb.snapshot_at(t(250))), ["temp(20)", "temp(21)"]);
    }

    #[test]
    fn non_ground_facts_never_supersede() {
        let kb = TemporalKb::new(true);
        kb.ingest_fact(c("seen(_)."), None, t(1)).unwrap();
        kb.ingest_fact(c("seen(_)."), None, t(2)).unwrap();
        assert_eq!(kb.snapshot_at(t(3)).clauses().len(), 2);
    }

    #[test]
    fn ingest_errors() {
        let kb = TemporalKb::new(false);
        assert_eq!(kb.ingest_fact(c("temp(20)."), None, t(1)), Err(KbError::StaticKb));
        let kb = TemporalKb::new(true);
        assert_eq!(kb.ingest_fact(c("a :- b."), None, t(1)), Err(KbError::NonFact));
        assert_eq!(kb.ingest_fact(c("a."), Some(0), t(1)), Err(KbError::InvalidLease));
    }

    #[test]
    fn set_theory_keeps_sensor_facts() {
        let kb = TemporalKb::new(true);
        kb.set_theory(vec![c("rule(1).")], t(10));
        kb.ingest_fact(c("temp(20)."), None, t(20)).unwrap();
        kb.set_theory(vec![c("rule(2).")], t(30));
        assert_eq!(heads(&kb.snapshot_at(t(30))), ["temp(20)", "rule(2)"]);
    }

    #[test]
    fn leaving_dynamic_mode_ends_sensor_facts() {
        let kb = TemporalKb::new(true);
        kb.ingest_fact(c("temp(20)."), None, t(20)).unwrap();
        kb.set_dynamic(false, t(30));
        assert!(kb.snapshot_at(t(30)).clauses().is_empty());
        assert_eq!(kb.snapshot_at(t(25)).clauses().len(), 1);
    }

    #[test]
    fn snapshot_examples() {
        let entry = |h: &str, from, to| TimedClause {
            clause: Arc::new(c(h)),
            validity: ValidityInterval::new(t(from), Some(t(to))).unwrap(),
            origin: Origin::Configurator,
        };
        let kb = TemporalKb::from_entries(vec![entry("a.", 0, 100), entry("b.", 50, 200)], false);
        assert_eq!(heads(&kb.snapshot_at(t(75))), ["a", "b"]);
        assert_eq!(heads(&kb.snapshot_at(t(150))), ["b"]);
        assert!(kb.snapshot_at(t(300)).clauses().is_empty());
    }

    #[test]
    fn prune_removes_ended_history() {
        let kb = TemporalKb::from_entries(
            vec![TimedClause {
                clause: Arc::new(c("a.")),
                validity: ValidityInterval::new(t(0), Some(t(100))).unwrap(),
                origin: Origin::Configurator,
            }],
            false,
        );
        let before = kb.snapshot_at(t(75));
        assert_eq!(kb.prune(t(50)), 0);
        assert_eq!(kb.prune(t(100)), 1);
        assert!(kb.snapshot_at(t(75)).clauses().is_empty());
        assert_eq!(heads(&before), ["a"]);
    }

    #[test]
    fn interval_validation() {
        assert!(ValidityInterval::new(t(5), Some(t(5))).is_none());
        assert!(ValidityInterval::new(t(5), Some(t(4))).is_none());
        assert!(ValidityInterval::new(t(5), None).is_some());
    }
}
