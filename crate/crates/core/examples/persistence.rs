//! Configuration, goals and theory survive a restart; sensor facts do not.
//!
//! `cargo run -p lpaas-core --example persistence`

use lpaas_core::access::{Principal, Role};
use lpaas_core::logic::{parse_clause, parse_term, parse_theory};
use lpaas_core::persistence::Store;
use lpaas_core::service::{KbMode, Service, ServiceConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::temp_dir().join(format!("lpaas-example-{}.store", std::process::id()));
    let admin = Principal::new("admin", Role::Configurator);

    {
        let service = Service::builder().store(Store::new(&path)).build()?;
        let config = service.admin(&admin)?;
        config.set_configuration(ServiceConfig {
            kb_mode: KbMode::Dynamic,
            goal_list: vec![parse_term("temp(R, T)")?],
            ..Default::default()
        })?;
        config.set_theory(parse_theory("temp(hall, 18).")?)?;
        service.ingest_fact(parse_clause("temp(kitchen, 22).")?, None)?;
        println!("before restart: {} clauses visible", service.theory(None)?.len());
    }

    println!("store file: {} ({} bytes)", path.display(), std::fs::metadata(&path)?.len());

    let service = Service::builder().store(Store::new(&path)).build()?;
    let restored = service.admin(&admin)?.configuration();
    println!("after restart: mode {:?}, goals {:?}", restored.kb_mode, restored.goal_list.iter().map(ToString::to_string).collect::<Vec<_>>());
    for clause in service.theory(None)? {
        println!("  {}", clause.clause);
    }
    std::fs::remove_file(&path)?;
    Ok(())
}
