//! Sensor facts in a dynamic knowledge base, and queries situated in the past.
//!
//! `cargo run -p lpaas --example sensors`

use std::thread;
use std::time::Duration;

use lpaas::auth::TokenAuthority;
use lpaas::client::Client;
use lpaas::server::{AppState, BackgroundServer};
use lpaas::wire::{ConfigBody, SolveBody};
use lpaas_core::access::{Role, UserRecord};
use lpaas_core::service::{KbMode, Mode, Service};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let service = Service::builder()
        .user(UserRecord::new("admin", "admin", Role::Configurator))
        .user(UserRecord::new("probe", "probe", Role::Client))
        .build()?;
    let server = BackgroundServer::start(AppState::new(service, TokenAuthority::ephemeral(60_000)), "127.0.0.1:0".parse()?)?;
    let admin = Client::new(server.url()).authenticated("admin", "admin")?;
    admin.set_configuration(&ConfigBody {
        kb_mode: KbMode::Dynamic,
        goal_list: vec!["temp(R, T)".into(), "warm(R)".into()],
        ..ConfigBody::default()
    })?;
    admin.set_theory("warm(R) :- temp(R, T), T >= 22.")?;

    let probe = Client::new(server.url()).authenticated("probe", "probe")?;
    probe.assert_fact("temp(kitchen, 20)", Some(400))?;
    thread::sleep(Duration::from_millis(50));
    let cold = lpaas::auth::unix_millis();
    thread::sleep(Duration::from_millis(50));
    probe.assert_fact("temp(office, 23)", None)?;

    let c = Client::new(server.url());
    let warm_now = c.solve_all("warm(R)")?;
    println!("warm now: {:?}", warm_now.iter().filter_map(|s| s.binding("R")).map(ToString::to_string).collect::<Vec<_>>());
    let warm_then = c.solve_with(&SolveBody { mode: Mode::All, at: Some(cold), ..SolveBody::goal("warm(R)") })?;
    println!("warm at {cold}: {:?}", warm_then.iter().filter_map(|s| s.binding("R")).map(ToString::to_string).collect::<Vec<_>>());

    thread::sleep(Duration::from_millis(400));
    println!("readings after the kitchen lease ran out:");
    for clause in c.get_theory(None)?.theory {
        println!("  {}  {:?}", clause.clause, clause.validity);
    }
    println!("full timeline (configurator view):");
    for clause in admin.get_theory_timeline()?.theory {
        println!("  {}  {:?} {:?}", clause.clause, clause.validity, clause.origin);
    }
    Ok(())
}
