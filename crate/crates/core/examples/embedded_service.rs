//! The service layer without HTTP: configuration, stateless requests with
//! fast-forward, and a stateful session.
//!
//! `cargo run -p lpaas-core --example embedded_service`

use lpaas_core::access::{Principal, Role};
use lpaas_core::logic::{parse_term, parse_theory};
use lpaas_core::service::{GoalSelector, Mode, Service, ServiceConfig, SolveRequest};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let service = Service::new();
    let admin = Principal::new("admin", Role::Configurator);
    let me = Principal::new("alice", Role::Client);

    let config = service.admin(&admin)?;
    config.set_configuration(ServiceConfig {
        goal_list: vec![parse_term("color(C)")?, parse_term("mix(A, B, C)")?],
        ..Default::default()
    })?;
    config.set_theory(parse_theory(
        "color(red). color(yellow). color(blue).
         mix(red, yellow, orange). mix(yellow, blue, green). mix(red, blue, purple).",
    )?)?;

    // stateless: every request carries everything it needs
    let all = service.solve(&SolveRequest::all(parse_term("color(C)")?))?;
    let colors: Vec<String> =
        all.iter().filter_map(|a| a.solution.bindings.get("C")).map(ToString::to_string).collect();
    println!("all colors: {}", colors.join(", "));
    let third = service.solve(&SolveRequest {
        mode: Mode::After,
        goal: Some(parse_term("color(C)")?),
        after_n: Some(2),
        ..Default::default()
    })?;
    println!("after skipping two: {}", third[0].solution.solved_goal);
    match service.solve(&SolveRequest::one(parse_term("secret(X)")?)) {
        Err(e) => println!("secret(X): {e}"),
        Ok(_) => unreachable!("not in the goal list"),
    }

    // stateful: the goal is set once, then each call continues the enumeration
    let id = service.open_session(&me)?;
    service.set_goal(&me, &id, &GoalSelector::Index(2))?;
    let next = SolveRequest::default();
    for _ in 0..2 {
        let answer = &service.solve_session(&me, &id, &next)?[0];
        println!("session: {}", answer.solution.solved_goal);
    }
    service.reset(&me, &id)?;
    println!("after reset: {}", service.solve_session(&me, &id, &next)?[0].solution.solved_goal);
    let info = service.session_info(&me, &id)?;
    println!("state {:?}, {} transitions", info.state, info.history.len());
    service.close(&me, &id)?;
    Ok(())
}
