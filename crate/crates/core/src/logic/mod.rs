//! Terms, text syntax, unification and SLD resolution.

mod arith;
pub mod builtins;
mod engine;
mod ops;
mod parser;
mod term;
mod theory;
mod unify;
mod writer;

pub use builtins::{eval_builtin, BuiltinOutcome};
pub use engine::{
    solve_iter, ResolutionLimits, Solution, SolveError, Solutions, UnknownPolicy, DEFAULT_MAX_DEPTH,
};
pub use parser::{clause_from_term, parse_clause, parse_term, parse_theory, SyntaxError};
pub use term::{Clause, Number, Term};
pub use theory::Theory;
pub use unify::{is_instance, is_variant, unify, Substitution};
pub use writer::atom_needs_quotes;
