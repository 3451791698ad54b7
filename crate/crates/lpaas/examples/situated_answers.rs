//! Two nodes with the same goal list answer the same query differently,
//! because each one only knows its own wall.
//!
//! `cargo run -p lpaas --example situated_answers`

use lpaas::auth::TokenAuthority;
use lpaas::client::Client;
use lpaas::scenario::{MATERIAL_QUERY, WALL_1_THEORY, WALL_2_THEORY, WALL_GOALS};
use lpaas::server::{AppState, BackgroundServer};
use lpaas::wire::ConfigBody;
use lpaas_core::access::{Role, UserRecord};
use lpaas_core::service::Service;

fn wall(theory: &str) -> Result<BackgroundServer, Box<dyn std::error::Error>> {
    let service = Service::builder().user(UserRecord::new("installer", "installer", Role::Configurator)).build()?;
    let server = BackgroundServer::start(AppState::new(service, TokenAuthority::ephemeral(60_000)), "127.0.0.1:0".parse()?)?;
    let admin = Client::new(server.url()).authenticated("installer", "installer")?;
    admin.set_configuration(&ConfigBody { goal_list: WALL_GOALS.iter().map(|g| g.to_string()).collect(), ..ConfigBody::default() })?;
    admin.set_theory(theory)?;
    Ok(server)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let walls = [("wall-1", wall(WALL_1_THEORY)?), ("wall-2", wall(WALL_2_THEORY)?)];
    for (name, server) in &walls {
        let answer = Client::new(server.url()).solve(MATERIAL_QUERY)?;
        let shown: Vec<String> = answer.bindings.iter().map(|(k, v)| format!("{k} = {v}")).collect();
        println!("[{name}] ?- {MATERIAL_QUERY}.\n    {}", shown.join(", "));
    }
    Ok(())
}
