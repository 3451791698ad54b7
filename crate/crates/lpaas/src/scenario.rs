//! Smart-house scenario: an assembler robot asks two wall nodes and a
//! furniture node for the knowledge it needs to mount a bookshelf.
//!
//! Both walls run the same service with the same goal list and answer the
//! same material query differently, because each knows only its own wall.

use std::io::{BufRead, BufReader};
use std::path::Path;
use std::process::{Child, Command, Stdio};
use std::time::{Duration, Instant};

use lpaas_core::logic::Term;

use crate::client::{Client, ClientError};
use crate::wire::{ConfigBody, WireSolution};

pub const MATERIAL_QUERY: &str = "wallMaterialSpecification(M, position(X, Y))";

pub const WALL_GOALS: &[&str] = &["wallMaterialSpecification(M, P)", "loadCapacity(P, Kg)"];

pub const WALL_1_THEORY: &str = "\
% Wall 1: plasterboard on a timber frame.
wall(wall001).
material(drywall).
stud(position(40, 0)).
stud(position(100, 0)).
stud(position(160, 0)).
wallMaterialSpecification('drywall with available wood stud', position(X, Y)) :-
    material(drywall),
    stud(position(X, Y)).
loadCapacity(position(X, Y), 35) :- stud(position(X, Y)).
";

pub const WALL_2_THEORY: &str = "\
% Wall 2: load-bearing brick.
wall(wall002).
material(masonry).
wallMaterialSpecification(masonry, position(_, _)) :- material(masonry).
loadCapacity(position(_, _), 80).
";

pub const FURNITURE_GOALS: &[&str] =
    &["assemblyStep(F, N, Action)", "fixing(F, Material, Hardware)", "mountable(F, Capacity)"];

pub const FURNITURE_THEORY: &str = "\
% A bookshelf that knows how to assemble itself.
piece(billy).
weight(billy, 30).
assemblyStep(billy, 1, attach(side_panel_left, bottom_board)).
assemblyStep(billy, 2, attach(side_panel_right, bottom_board)).
assemblyStep(billy, 3, insert(shelves)).
assemblyStep(billy, 4, attach(top_board, side_panels)).
assemblyStep(billy, 5, fix_to_wall).
fixing(billy, 'drywall with available wood stud', wood_screws).
fixing(billy, masonry, wall_plugs_and_screws).
mountable(F, Capacity) :- weight(F, W), Capacity >= W.
";

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot start node {node}: {reason}")]
    Spawn { node: &'static str, reason: String },
    #[error("node {node} failed its health check")]
    Health { node: &'static str },
    #[error("node {node}: {source}")]
    Request { node: &'static str, source: ClientError },
    #[error("unexpected answer from {node}: {detail}")]
    Unexpected { node: &'static str, detail: String },
}

/// A running `lpaas serve` child process, killed on drop.
struct Node {
    name: &'static str,
    child: Child,
    url: String,
}

impl Drop for Node {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

const ADMIN: &str = "installer";

fn spawn(bin: &Path, name: &'static str, password: &str) -> Result<Node, ScenarioError> {
    let spawn_err = |reason: String| ScenarioError::Spawn { node: name, reason };
    let mut child = Command::new(bin)
        .args(["serve", "--listen", "127.0.0.1:0", "--memory"])
        .env("LPAAS_ADMIN_USER", ADMIN)
        .env("LPAAS_ADMIN_PASSWORD", password)
        .env("RUST_LOG", "error")
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::inherit())
        .spawn()
        .map_err(|e| spawn_err(e.to_string()))?;
    let stdout = child.stdout.take().expect("piped stdout");
    let mut line = String::new();
    let read = BufReader::new(stdout).read_line(&mut line);
    let mut node = Node { name, child, url: String::new() };
    match read {
        Ok(n) if n > 0 => {}
        _ => return Err(spawn_err("no listening address reported".into())),
    }
    let url = line.trim().strip_prefix("listening on ").ok_or_else(|| spawn_err(format!("unexpected output {line:?}")))?;
    node.url = url.to_string();
    Ok(node)
}

fn wait_healthy(node: &Node) -> Result<(), ScenarioError> {
    let client = Client::new(&node.url);
    let start = Instant::now();
    while start.elapsed() < Duration::from_secs(5) {
        if client.health().is_ok() {
            return Ok(());
        }
        std::thread::sleep(Duration::from_millis(20));
    }
    Err(ScenarioError::Health { node: node.name })
}

fn configure(node: &Node, password: &str, goals: &[&str], theory: &str) -> Result<(), ScenarioError> {
    let req = |source| ScenarioError::Request { node: node.name, source };
    let admin = Client::new(&node.url).authenticated(ADMIN, password).map_err(req)?;
    let config = ConfigBody { goal_list: goals.iter().map(|g| g.to_string()).collect(), ..ConfigBody::default() };
    admin.set_configuration(&config).map_err(req)?;
    admin.set_theory(theory).map_err(req)?;
    Ok(())
}

/// The record of one scenario run.
#[derive(Debug, Clone, Default)]
pub struct Transcript {
    pub lines: Vec<String>,
    /// Material query answers of wall 1 and wall 2.
    pub wall_answers: Vec<WireSolution>,
    /// Assembly steps from the furniture node.
    pub steps: Vec<WireSolution>,
    /// Hardware for each wall, in wall order.
    pub fixings: Vec<WireSolution>,
    /// Whether wall 1 refused a furniture goal.
    pub wall_refused_furniture_goal: bool,
}

impl Transcript {
    pub fn text(&self) -> String {
        self.lines.iter().map(|l| format!("{l}\n")).collect()
    }

    fn ask(&mut self, node: &str, what: &str) {
        self.lines.push(format!("[{node}] ?- {what}"));
    }

    fn answer(&mut self, s: &WireSolution) {
        let line = if s.success {
            let bindings: Vec<String> = s.bindings.iter().map(|(k, v)| format!("{k} = {v}")).collect();
            if bindings.is_empty() {
                "true".to_string()
            } else {
                bindings.join(", ")
            }
        } else {
            "no".to_string()
        };
        self.lines.push(format!("    {line}"));
    }
}

fn material(s: &WireSolution) -> Option<&Term> {
    s.binding("M")
}

/// Runs the scenario against three fresh nodes started from `bin`.
pub fn smart_house(bin: &Path) -> Result<Transcript, ScenarioError> {
    let password = format!("{:032x}", rand::random::<u128>());
    let specs = [("wall-1", WALL_GOALS, WALL_1_THEORY), ("wall-2", WALL_GOALS, WALL_2_THEORY), (
        "furniture",
        FURNITURE_GOALS,
        FURNITURE_THEORY,
    )];
    // nodes start and are configured concurrently
    let started: Vec<Result<Node, ScenarioError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = specs
            .iter()
            .map(|&(name, goals, theory)| {
                let password = &password;
                scope.spawn(move || {
                    let node = spawn(bin, name, password)?;
                    wait_healthy(&node)?;
                    configure(&node, password, goals, theory)?;
                    Ok(node)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("node starter panicked")).collect()
    });
    let mut nodes = Vec::new();
    for n in started {
        nodes.push(n?);
    }
    let [wall1, wall2, furniture] = &nodes[..] else { unreachable!("three nodes") };
    let err = |node: &'static str| move |source| ScenarioError::Request { node, source };
    let mut t = Transcript::default();

    let steps_query = "assemblyStep(billy, N, Action)";
    t.ask(furniture.name, steps_query);
    t.steps = Client::new(&furniture.url).solve_all(steps_query).map_err(err(furniture.name))?;
    t.steps.retain(|s| s.success);
    for s in t.steps.clone() {
        t.answer(&s);
    }

    for wall in [wall1, wall2] {
        let client = Client::new(&wall.url);
        t.ask(wall.name, MATERIAL_QUERY);
        let answer = client.solve(MATERIAL_QUERY).map_err(err(wall.name))?;
        t.answer(&answer);
        let m = material(&answer)
            .cloned()
            .ok_or_else(|| ScenarioError::Unexpected { node: wall.name, detail: "no material".into() })?;
        let at = match (answer.binding("X"), answer.binding("Y")) {
            (Some(x), Some(y)) => format!("position({x}, {y})"),
            _ => "position(0, 0)".into(),
        };
        let capacity_query = format!("loadCapacity({at}, Kg)");
        t.ask(wall.name, &capacity_query);
        let capacity = client.solve(&capacity_query).map_err(err(wall.name))?;
        t.answer(&capacity);
        t.wall_answers.push(answer);

        let furniture_client = Client::new(&furniture.url);
        if let Some(kg) = capacity.binding("Kg") {
            let q = format!("mountable(billy, {kg})");
            t.ask(furniture.name, &q);
            let ok = furniture_client.solve(&q).map_err(err(furniture.name))?;
            t.answer(&ok);
        }
        let q = format!("fixing(billy, {m}, Hardware)");
        t.ask(furniture.name, &q);
        let fixing = furniture_client.solve(&q).map_err(err(furniture.name))?;
        t.answer(&fixing);
        t.fixings.push(fixing);
    }

    t.ask(wall1.name, steps_query);
    match Client::new(&wall1.url).solve(steps_query) {
        Err(e) if e.code() == Some("GoalNotPermitted") => {
            t.wall_refused_furniture_goal = true;
            t.lines.push("    refused: GoalNotPermitted".into());
        }
        Ok(s) => t.answer(&s),
        Err(e) => return Err(err(wall1.name)(e)),
    }
    Ok(t)
}
