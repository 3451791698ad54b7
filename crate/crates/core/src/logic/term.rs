use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// Numeric constant. Integers are 64-bit signed, decimals are IEEE doubles.
#[derive(Debug, Clone, Copy)]
pub enum Number {
    Int(i64),
    Float(f64),
}

impl Number {
    pub fn as_f64(self) -> f64 {
        match self {
            Number::Int(i) => i as f64,
            Number::Float(f) => f,
        }
    }
}

// Structural equality: 1 and 1.0 are different terms, and floats compare
// by bit pattern so that terms can be used as map keys reliably.
impl PartialEq for Number {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Number::Int(a), Number::Int(b)) => a == b,
            (Number::Float(a), Number::Float(b)) => a.to_bits() == b.to_bits() || a == b,
            _ => false,
        }
    }
}

impl Eq for Number {}

impl From<i64> for Number {
    fn from(value: i64) -> Self {
        Number::Int(value)
    }
}

impl From<f64> for Number {
    fn from(value: f64) -> Self {
        Number::Float(value)
    }
}

/// A first-order logic term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Atom(Arc<str>),
    Number(Number),
    Var(Arc<str>),
    /// Functor and arguments; the argument list is never empty.
    Compound(Arc<str>, Arc<[Term]>),
}

impl Term {
    pub fn atom(name: impl AsRef<str>) -> Term {
        Term::Atom(Arc::from(name.as_ref()))
    }

    pub fn var(name: impl AsRef<str>) -> Term {
        Term::Var(Arc::from(name.as_ref()))
    }

    pub fn int(value: i64) -> Term {
        Term::Number(Number::Int(value))
    }

    pub fn float(value: f64) -> Term {
        Term::Number(Number::Float(value))
    }

    /// Builds a compound term. An empty argument list yields an atom, keeping
    /// the "arity ≥ 1" invariant for `Compound`.
    pub fn compound(functor: impl AsRef<str>, args: Vec<Term>) -> Term {
        if args.is_empty() {
            Term::atom(functor)
        } else {
            Term::Compound(Arc::from(functor.as_ref()), Arc::from(args))
        }
    }

    /// Builds a proper list `[a, b, c]` terminated by `tail` (use `[]` for a closed list).
    pub fn list(items: Vec<Term>, tail: Term) -> Term {
        items
            .into_iter()
            .rev()
            .fold(tail, |acc, item| Term::compound(".", vec![item, acc]))
    }

    pub fn nil() -> Term {
        Term::atom("[]")
    }

    /// Functor name and arity; numbers and variables have no functor.
    pub fn functor(&self) -> Option<(&str, usize)> {
        match self {
            Term::Atom(name) => Some((name, 0)),
            Term::Compound(name, args) => Some((name, args.len())),
            _ => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Compound(_, args) => args,
            _ => &[],
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_callable(&self) -> bool {
        matches!(self, Term::Atom(_) | Term::Compound(..))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Compound(_, args) => args.iter().all(Term::is_ground),
            _ => true,
        }
    }

    /// Variables in order of first occurrence, without duplicates.
    pub fn variables(&self) -> Vec<Arc<str>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        self.collect_vars(&mut seen, &mut out);
        out
    }

    fn collect_vars(&self, seen: &mut BTreeSet<Arc<str>>, out: &mut Vec<Arc<str>>) {
        match self {
            Term::Var(name) => {
                if seen.insert(name.clone()) {
                    out.push(name.clone());
                }
            }
            Term::Compound(_, args) => {
                for arg in args.iter() {
                    arg.collect_vars(seen, out);
                }
            }
            _ => {}
        }
    }

    pub fn contains_var(&self, name: &str) -> bool {
        match self {
            Term::Var(v) => &**v == name,
            Term::Compound(_, args) => args.iter().any(|a| a.contains_var(name)),
            _ => false,
        }
    }

    /// Renames every variable through `f`, leaving the shape untouched.
    pub fn map_vars(&self, f: &mut impl FnMut(&Arc<str>) -> Term) -> Term {
        match self {
            Term::Var(name) => f(name),
            Term::Compound(functor, args) => Term::Compound(
                functor.clone(),
                args.iter().map(|a| a.map_vars(f)).collect(),
            ),
            other => other.clone(),
        }
    }

    /// Splits a conjunction `(A, B, C)` into its conjuncts.
    pub fn conjuncts(&self) -> Vec<Term> {
        let mut out = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Term::Compound(f, args) if &**f == "," && args.len() == 2 => {
                    out.push(args[0].clone());
                    cur = &args[1];
                }
                other => {
                    out.push(other.clone());
                    return out;
                }
            }
        }
    }

    /// Left-to-right conjunction of `goals`, or `true` when empty.
    pub fn conjunction(goals: &[Term]) -> Term {
        match goals.split_last() {
            None => Term::atom("true"),
            Some((last, init)) => init
                .iter()
                .rev()
                .fold(last.clone(), |acc, g| Term::compound(",", vec![g.clone(), acc])),
        }
    }
}

/// Horn clause. A fact has an empty body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub head: Term,
    pub body: Vec<Term>,
}

impl Clause {
    pub fn fact(head: Term) -> Clause {
        Clause { head, body: Vec::new() }
    }

    pub fn rule(head: Term, body: Vec<Term>) -> Clause {
        Clause { head, body }
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }

    /// `(name, arity)` of the head.
    pub fn key(&self) -> (&str, usize) {
        self.head.functor().expect("clause head is callable")
    }

    /// Reassembles the clause as a single term (`Head :- Body` or `Head`).
    pub fn to_term(&self) -> Term {
        if self.body.is_empty() {
            self.head.clone()
        } else {
            Term::compound(":-", vec![self.head.clone(), Term::conjunction(&self.body)])
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = self.to_term().to_string();
        let sep = if text.ends_with(|c: char| "+-*/\\^<>=~:.?@#&$".contains(c)) { " " } else { "" };
        write!(f, "{text}{sep}.")
    }
}
