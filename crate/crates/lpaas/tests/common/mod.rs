#![allow(dead_code)]

use lpaas::auth::TokenAuthority;
use lpaas::client::Client;
use lpaas::server::{AppState, BackgroundServer};
use lpaas::wire::ConfigBody;
use lpaas_core::access::{Role, UserRecord};
use lpaas_core::logic::{Number, Term};
use lpaas_core::service::{KbMode, Service};
use proptest::prelude::*;

pub const SECRET: &[u8] = b"test secret";

pub fn authority() -> TokenAuthority {
    TokenAuthority::new(SECRET.to_vec(), 60_000)
}

/// A server with users `admin`/`admin` (configurator) and `bob`/`bob` (client).
pub fn server_with(service: Service) -> BackgroundServer {
    BackgroundServer::start(AppState::new(service, authority()), "127.0.0.1:0".parse().unwrap()).unwrap()
}

pub fn users() -> Service {
    Service::builder()
        .user(UserRecord::new("admin", "admin", Role::Configurator))
        .user(UserRecord::new("bob", "bob", Role::Client))
        .build()
        .unwrap()
}

pub fn configured(theory: &str, goals: &[&str], mode: KbMode) -> (BackgroundServer, Client) {
    let server = server_with(users());
    let admin = Client::new(server.url()).authenticated("admin", "admin").unwrap();
    let config =
        ConfigBody { kb_mode: mode, goal_list: goals.iter().map(|g| g.to_string()).collect(), ..ConfigBody::default() };
    admin.set_configuration(&config).unwrap();
    admin.set_theory(theory).unwrap();
    (server, admin)
}

fn name() -> impl Strategy<Value = String> {
    prop_oneof![
        "[a-z][a-zA-Z0-9_]{0,6}",
        "[ -~]{0,8}",
        Just("[]".to_string()),
        Just("{}".to_string()),
        Just(",".to_string()),
        Just("héllo wörld".to_string()),
        Just("'".to_string()),
        Just("\\n".to_string()),
    ]
}

/// Arbitrary terms, including awkward atom names and extreme numbers.
pub fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        name().prop_map(Term::atom),
        "[A-Z_][a-zA-Z0-9_]{0,5}".prop_map(Term::var),
        any::<i64>().prop_map(Term::int),
        any::<f64>().prop_filter("finite", |f| f.is_finite()).prop_map(|f| Term::Number(Number::Float(f))),
    ];
    leaf.prop_recursive(4, 48, 5, |inner| {
        (name(), prop::collection::vec(inner, 1..5)).prop_map(|(f, args)| Term::Compound(f.into(), args.into()))
    })
}
