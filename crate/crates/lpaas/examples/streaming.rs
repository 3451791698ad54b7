//! A paced stream of solutions, paused and resumed from a second connection.
//!
//! `cargo run -p lpaas --example streaming`

use std::thread;
use std::time::{Duration, Instant};

use lpaas::auth::TokenAuthority;
use lpaas::client::Client;
use lpaas::server::{AppState, BackgroundServer};
use lpaas::wire::ConfigBody;
use lpaas_core::access::{Role, UserRecord};
use lpaas_core::service::Service;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let service = Service::builder().user(UserRecord::new("admin", "admin", Role::Configurator)).build()?;
    let server = BackgroundServer::start(AppState::new(service, TokenAuthority::ephemeral(60_000)), "127.0.0.1:0".parse()?)?;
    let admin = Client::new(server.url()).authenticated("admin", "admin")?;
    admin.set_configuration(&ConfigBody { goal_list: vec!["tick(N)".into()], ..ConfigBody::default() })?;
    admin.set_theory("tick(1). tick(2). tick(3). tick(4). tick(5). tick(6).")?;

    let client = Client::new(server.url());
    let session = client.open_session()?;
    session.set_goal_index(1)?;
    let id = session.id().to_string();

    let url = server.url();
    let controller = thread::spawn(move || {
        let c = Client::new(url);
        let s = c.session(id);
        thread::sleep(Duration::from_millis(450));
        s.pause().unwrap();
        println!("   -- paused");
        thread::sleep(Duration::from_millis(600));
        s.resume().unwrap();
        println!("   -- resumed");
    });

    let start = Instant::now();
    for record in session.stream_every(200)? {
        let record = record?;
        let at = start.elapsed().as_millis();
        match (record.binding("N"), &record.error) {
            (Some(n), _) => println!("{at:>5} ms  N = {n}"),
            (None, Some(e)) => println!("{at:>5} ms  {}: {}", e.code, e.message),
            (None, None) => println!("{at:>5} ms  no more solutions"),
        }
    }
    controller.join().unwrap();
    Ok(())
}
