use std::collections::HashMap;
use std::sync::Arc;

use super::term::Clause;

/// An immutable, indexed list of clauses.
#[derive(Debug, Default)]
pub struct Theory {
    clauses: Vec<Arc<Clause>>,
    index: HashMap<Arc<str>, HashMap<usize, Arc<[usize]>>>,
}

impl Theory {
    pub fn new(clauses: impl IntoIterator<Item = Arc<Clause>>) -> Self {
        let clauses: Vec<Arc<Clause>> = clauses.into_iter().collect();
        let mut groups: HashMap<Arc<str>, HashMap<usize, Vec<usize>>> = HashMap::new();
        for (i, c) in clauses.iter().enumerate() {
            let (name, arity) = c.key();
            groups.entry(Arc::from(name)).or_default().entry(arity).or_default().push(i);
        }
        let index = groups
            .into_iter()
            .map(|(name, by_arity)| (name, by_arity.into_iter().map(|(a, v)| (a, Arc::from(v))).collect()))
            .collect();
        Theory { clauses, index }
    }

    pub fn from_clauses(clauses: Vec<Clause>) -> Self {
        Self::new(clauses.into_iter().map(Arc::new))
    }

    pub fn clauses(&self) -> &[Arc<Clause>] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub(crate) fn clause(&self, i: usize) -> &Arc<Clause> {
        &self.clauses[i]
    }

    /// Clause positions for `name/arity` in textual order, or `None` when
    /// the predicate has no clauses.
    pub(crate) fn candidates(&self, name: &str, arity: usize) -> Option<Arc<[usize]>> {
        self.index.get(name)?.get(&arity).cloned()
    }

    pub fn defines(&self, name: &str, arity: usize) -> bool {
        self.candidates(name, arity).is_some()
    }
}

impl PartialEq for Theory {
    fn eq(&self, other: &Self) -> bool {
        self.clauses == other.clauses
    }
}
