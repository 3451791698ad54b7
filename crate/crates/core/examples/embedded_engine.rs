//! Runs the resolution engine directly, without a service around it.
//!
//! `cargo run -p lpaas-core --example embedded_engine`

use std::sync::Arc;

use lpaas_core::logic::{parse_term, parse_theory, solve_iter, ResolutionLimits, Theory};

const FAMILY: &str = "
parent(abraham, isaac).
parent(isaac, jacob).
parent(jacob, joseph).
grandparent(X, Z) :- parent(X, Y), parent(Y, Z).
ancestor(X, Y) :- parent(X, Y).
ancestor(X, Y) :- parent(X, Z), ancestor(Z, Y).
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let theory = Arc::new(Theory::from_clauses(parse_theory(FAMILY)?));

    for query in ["grandparent(G, jacob)", "ancestor(abraham, D)", "ancestor(joseph, _)"] {
        println!("?- {query}.");
        let mut any = false;
        for solution in solve_iter(theory.clone(), parse_term(query)?, ResolutionLimits::default()) {
            let solution = solution?;
            any = true;
            let bindings: Vec<String> = solution.bindings.iter().map(|(k, v)| format!("{k} = {v}")).collect();
            println!("   {}", if bindings.is_empty() { "true".into() } else { bindings.join(", ") });
        }
        if !any {
            println!("   false");
        }
    }

    // solutions are produced lazily, so an infinite enumeration is fine
    let nat = Arc::new(Theory::from_clauses(parse_theory("nat(0). nat(N) :- nat(M), N is M + 1.")?));
    let first: Vec<String> = solve_iter(nat, parse_term("nat(N)")?, ResolutionLimits::default())
        .take(5)
        .map(|s| s.map(|s| s.solved_goal.to_string()))
        .collect::<Result<_, _>>()?;
    println!("first naturals: {}", first.join(" "));
    Ok(())
}
