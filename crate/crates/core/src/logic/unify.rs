use std::collections::BTreeMap;
use std::sync::Arc;

use super::term::Term;

/// Idempotent variable bindings: no bound variable occurs in any bound value.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    bindings: BTreeMap<Arc<str>, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.bindings.get(var)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Arc<str>, &Term)> {
        self.bindings.iter()
    }

    pub fn apply(&self, t: &Term) -> Term {
        if self.bindings.is_empty() {
            return t.clone();
        }
        match t {
            Term::Var(v) => self.bindings.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::Compound(f, args) => Term::Compound(f.clone(), args.iter().map(|a| self.apply(a)).collect()),
            other => other.clone(),
        }
    }

    /// Adds `var ↦ value`, where `value` is already fully applied and does
    /// not contain `var`. Keeps the map idempotent.
    fn bind(&mut self, var: Arc<str>, value: Term) {
        let single = Substitution { bindings: BTreeMap::from([(var.clone(), value.clone())]) };
        for v in self.bindings.values_mut() {
            if v.contains_var(&var) {
                *v = single.apply(v);
            }
        }
        self.bindings.insert(var, value);
    }

    /// Composition `self ∘ other`: applying the result equals applying
    /// `self` first and then `other`.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        let mut bindings: BTreeMap<Arc<str>, Term> =
            self.bindings.iter().map(|(k, v)| (k.clone(), other.apply(v))).collect();
        for (k, v) in &other.bindings {
            bindings.entry(k.clone()).or_insert_with(|| v.clone());
        }
        bindings.retain(|k, v| !matches!(v, Term::Var(x) if x == k));
        Substitution { bindings }
    }

    /// Keeps only the bindings of `vars`.
    pub fn restrict(&self, vars: &[Arc<str>]) -> Substitution {
        Substitution {
            bindings: self
                .bindings
                .iter()
                .filter(|(k, _)| vars.contains(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }
}

impl FromIterator<(Arc<str>, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Arc<str>, Term)>>(iter: I) -> Self {
        let mut s = Substitution::new();
        for (k, v) in iter {
            let v = s.apply(&v);
            if !matches!(&v, Term::Var(x) if *x == k) {
                s.bind(k, v);
            }
        }
        s
    }
}

/// Most general unifier of `a` and `b` extending `s`, with occurs check.
pub fn unify(a: &Term, b: &Term, s: &Substitution) -> Option<Substitution> {
    let mut s = s.clone();
    let mut stack = vec![(s.apply(a), s.apply(b))];
    while let Some((x, y)) = stack.pop() {
        let x = s.apply(&x);
        let y = s.apply(&y);
        match (&x, &y) {
            (Term::Var(v), Term::Var(w)) if v == w => {}
            (Term::Var(v), t) | (t, Term::Var(v)) => {
                if t.contains_var(v) {
                    return None;
                }
                s.bind(v.clone(), t.clone());
            }
            (Term::Compound(f, xs), Term::Compound(g, ys)) => {
                if f != g || xs.len() != ys.len() {
                    return None;
                }
                stack.extend(xs.iter().cloned().zip(ys.iter().cloned()));
            }
            _ if x == y => {}
            _ => return None,
        }
    }
    Some(s)
}

/// Whether `term` is an instance of `template`: some substitution of the
/// template's variables makes it syntactically equal to `term`. Variables in
/// `term` are treated as constants.
pub fn is_instance(term: &Term, template: &Term) -> bool {
    let mut map: BTreeMap<&str, &Term> = BTreeMap::new();
    matches_into(template, term, &mut map)
}

fn matches_into<'a>(pattern: &'a Term, t: &'a Term, map: &mut BTreeMap<&'a str, &'a Term>) -> bool {
    match (pattern, t) {
        (Term::Var(v), _) => match map.get(&**v) {
            Some(bound) => *bound == t,
            None => {
                map.insert(v, t);
                true
            }
        },
        (Term::Compound(f, xs), Term::Compound(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys.iter()).all(|(x, y)| matches_into(x, y, map))
        }
        _ => pattern == t,
    }
}

/// Variant check: equal up to a consistent renaming of variables.
pub fn is_variant(a: &Term, b: &Term) -> bool {
    is_instance(a, b) && is_instance(b, a)
}
