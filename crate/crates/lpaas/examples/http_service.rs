//! Starts a node on a free port and drives it with the blocking client:
//! login, configuration, stateless solves and a session.
//!
//! `cargo run -p lpaas --example http_service`

use lpaas::auth::TokenAuthority;
use lpaas::client::Client;
use lpaas::server::{AppState, BackgroundServer};
use lpaas::wire::{ConfigBody, SolveBody};
use lpaas_core::access::{Role, UserRecord};
use lpaas_core::service::{Mode, Service};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let service = Service::builder().user(UserRecord::new("admin", "s3cret", Role::Configurator)).build()?;
    let server = BackgroundServer::start(AppState::new(service, TokenAuthority::ephemeral(3_600_000)), "127.0.0.1:0".parse()?)?;
    println!("serving on {}", server.url());

    let admin = Client::new(server.url()).authenticated("admin", "s3cret")?;
    admin.set_configuration(&ConfigBody { goal_list: vec!["path(A, B)".into()], ..ConfigBody::default() })?;
    admin.set_theory(
        "edge(a, b). edge(b, c). edge(c, d).
         path(X, Y) :- edge(X, Y).
         path(X, Y) :- edge(X, Z), path(Z, Y).",
    )?;

    let anyone = Client::new(server.url());
    println!("goals: {:?}", anyone.get_goals()?.goals);
    println!("is path(a, X) allowed? {}", anyone.is_goal("path(a, X)")?);

    for s in anyone.solve_all("path(a, X)")? {
        if let Some(x) = s.binding("X") {
            println!("path(a, {x})");
        }
    }
    let page = anyone.solve_with(&SolveBody { mode: Mode::N, n_sol: Some(2), after_n: Some(1), ..SolveBody::goal("path(a, X)") })?;
    println!("two after the first: {}", page.iter().map(|s| s.solved_goal.to_string()).collect::<Vec<_>>().join(", "));

    let session = anyone.open_session()?;
    session.set_goal_template("path(b, X)")?;
    println!("session {}: {}", session.id(), session.solve()?.solved_goal);
    println!("session {}: {}", session.id(), session.solve()?.solved_goal);
    session.close()?;

    match anyone.solve("edge(a, X)") {
        Err(e) => println!("edge(a, X): {e}"),
        Ok(_) => unreachable!("edge/2 is not in the goal list"),
    }
    Ok(())
}
