//! The `lpaas` command-line tool.
//!
//! Exit codes: 0 when the command succeeded (for solving commands: at least
//! one success solution), 1 when a solving command produced only failure
//! solutions or `goals check` answered false, 2 on transport or protocol
//! errors, including every error status from the server.

use std::ffi::OsString;
use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lpaas_core::service::{KbMode, Mode};
use serde::Serialize;

use crate::client::{Client, ClientError, Endpoint};
use crate::settings::Settings;
use crate::wire::{SolveBody, StreamBody, WireSolution};
use crate::{scenario, server};

#[derive(Debug, Parser)]
#[command(name = "lpaas", version, about = "Logic programming as a service")]
pub struct Cli {
    /// Service base URL.
    #[arg(long, env = "LPAAS_URL", default_value = "http://127.0.0.1:8080", global = true)]
    pub url: String,
    /// Bearer token from `lpaas login`.
    #[arg(long, env = "LPAAS_TOKEN", global = true, hide_env_values = true)]
    pub token: Option<String>,
    /// Compact single-line JSON instead of pretty-printed output.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a service node.
    Serve(ServeArgs),
    /// Obtain a token.
    Login {
        username: String,
        #[arg(long, env = "LPAAS_PASSWORD", hide_env_values = true)]
        password: String,
    },
    #[command(subcommand)]
    Config(ConfigCmd),
    #[command(subcommand)]
    Theory(TheoryCmd),
    #[command(subcommand)]
    Goals(GoalsCmd),
    /// Stateless solve.
    Solve {
        goal: String,
        #[command(flatten)]
        count: CountArgs,
        /// Skip this many solutions first.
        #[arg(long)]
        after: Option<usize>,
        #[arg(long, value_name = "MS")]
        within: Option<u64>,
        #[arg(long, value_name = "MS")]
        at: Option<u64>,
    },
    #[command(subcommand)]
    Session(SessionCmd),
    #[command(subcommand)]
    Sensor(SensorCmd),
    #[command(subcommand)]
    Scenario(ScenarioCmd),
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// TOML settings file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub listen: Option<SocketAddr>,
    #[arg(long, conflicts_with = "memory")]
    pub store: Option<PathBuf>,
    /// Keep all state in memory.
    #[arg(long)]
    pub memory: bool,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct CountArgs {
    /// Ask for up to K solutions.
    #[arg(long, value_name = "K", conflicts_with = "all")]
    pub n: Option<usize>,
    /// Ask for all solutions.
    #[arg(long)]
    pub all: bool,
}

impl CountArgs {
    fn mode(self) -> (Mode, Option<usize>) {
        match (self.n, self.all) {
            (Some(n), _) => (Mode::N, Some(n)),
            (None, true) => (Mode::All, None),
            (None, false) => (Mode::One, None),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum ConfigCmd {
    /// Full configuration (configurator).
    Get,
    /// Change configuration fields (configurator); others keep their values.
    Set {
        #[arg(long, value_enum)]
        kb_mode: Option<KbModeArg>,
        #[arg(long)]
        stateful: Option<bool>,
        #[arg(long)]
        stateless: Option<bool>,
        #[arg(long, value_name = "MS")]
        deadline: Option<u64>,
    },
    /// Restore defaults (configurator).
    Reset,
    /// Public configuration.
    Public,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KbModeArg {
    Static,
    Dynamic,
}

#[derive(Debug, Subcommand)]
pub enum TheoryCmd {
    /// Clauses valid now, or at `--at`.
    Get {
        #[arg(long, value_name = "MS", conflicts_with = "admin")]
        at: Option<u64>,
        /// Full timeline with validity intervals (configurator).
        #[arg(long)]
        admin: bool,
    },
    /// Replace the theory with the clauses in FILE, or stdin for `-`.
    Set { file: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum GoalsCmd {
    Get {
        /// Read through the configurator interface.
        #[arg(long)]
        admin: bool,
    },
    /// Replace the goal list (configurator).
    Set { goals: Vec<String> },
    /// Whether a goal may be asked.
    Check { goal: String },
}

#[derive(Debug, Subcommand)]
pub enum SessionCmd {
    Open,
    Info { id: String },
    /// Select the session goal.
    Goal {
        id: String,
        #[arg(long, conflicts_with = "template", required_unless_present = "template")]
        index: Option<i64>,
        #[arg(long)]
        template: Option<String>,
    },
    Solve {
        id: String,
        #[command(flatten)]
        count: CountArgs,
        #[arg(long, value_name = "MS")]
        within: Option<u64>,
        #[arg(long, value_name = "MS")]
        at: Option<u64>,
    },
    /// Print solutions as they are delivered, one JSON record per line.
    Stream {
        id: String,
        #[arg(long, value_name = "MS")]
        every: u64,
        #[command(flatten)]
        count: CountArgs,
        #[arg(long, value_name = "MS")]
        at: Option<u64>,
        /// Stop after this many records.
        #[arg(long)]
        limit: Option<usize>,
    },
    Pause { id: String },
    Resume { id: String },
    Reset { id: String },
    Close { id: String },
}

#[derive(Debug, Subcommand)]
pub enum SensorCmd {
    /// Add a perception to a dynamic knowledge base.
    Assert {
        fact: String,
        #[arg(long, value_name = "MS")]
        lease: Option<u64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ScenarioCmd {
    /// Start two wall nodes and a furniture node and query them.
    SmartHouse {
        /// Also write the transcript to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Which side of the service an interface method belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Interface {
    Configurator,
    Client,
}

/// An interface method together with its variant flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Operation {
    pub interface: Interface,
    pub method: &'static str,
    pub stateful: bool,
    pub within: bool,
    pub every: bool,
    pub timestamp: bool,
}

impl Operation {
    fn configurator(method: &'static str) -> Self {
        Operation { interface: Interface::Configurator, method, stateful: false, within: false, every: false, timestamp: false }
    }

    fn client(method: &'static str) -> Self {
        Operation { interface: Interface::Client, ..Operation::configurator(method) }
    }
}

fn solve_method(count: CountArgs, after: bool) -> &'static str {
    match (count.mode().0, after) {
        (Mode::N, false) => "solveN",
        (Mode::N, true) => "solveNAfter",
        (Mode::All, false) => "solveAll",
        (Mode::All, true) => "solveAllAfter",
        (_, false) => "solve",
        (_, true) => "solveAfter",
    }
}

impl Command {
    /// The interface method this command invokes; `None` for tooling
    /// commands (serve, login, session info, sensor, scenario).
    pub fn operation(&self) -> Option<Operation> {
        use Operation as O;
        Some(match self {
            Command::Config(ConfigCmd::Get) => O::configurator("getConfiguration"),
            Command::Config(ConfigCmd::Set { .. }) => O::configurator("setConfiguration"),
            Command::Config(ConfigCmd::Reset) => O::configurator("resetConfiguration"),
            Command::Config(ConfigCmd::Public) => O::client("getServiceConfiguration"),
            Command::Theory(TheoryCmd::Get { admin: true, .. }) => O::configurator("getTheory"),
            Command::Theory(TheoryCmd::Get { at, .. }) => O { timestamp: at.is_some(), ..O::client("getTheory") },
            Command::Theory(TheoryCmd::Set { .. }) => O::configurator("setTheory"),
            Command::Goals(GoalsCmd::Get { admin: true }) => O::configurator("getGoals"),
            Command::Goals(GoalsCmd::Get { admin: false }) => O::client("getGoals"),
            Command::Goals(GoalsCmd::Set { .. }) => O::configurator("setGoals"),
            Command::Goals(GoalsCmd::Check { .. }) => O::client("isGoal"),
            Command::Solve { count, after, within, at, .. } => O {
                within: within.is_some(),
                timestamp: at.is_some(),
                ..O::client(solve_method(*count, after.is_some()))
            },
            Command::Session(cmd) => {
                let stateful = |method| O { stateful: true, ..O::client(method) };
                match cmd {
                    SessionCmd::Goal { index: Some(_), .. } => stateful("setGoal(index)"),
                    SessionCmd::Goal { .. } => stateful("setGoal(template)"),
                    SessionCmd::Solve { count, within, at, .. } => {
                        O { within: within.is_some(), timestamp: at.is_some(), ..stateful(solve_method(*count, false)) }
                    }
                    SessionCmd::Stream { count, at, .. } => {
                        O { every: true, timestamp: at.is_some(), ..stateful(solve_method(*count, false)) }
                    }
                    SessionCmd::Pause { .. } => stateful("pause"),
                    SessionCmd::Resume { .. } => stateful("resume"),
                    SessionCmd::Reset { .. } => stateful("reset"),
                    SessionCmd::Close { .. } => stateful("close"),
                    SessionCmd::Open | SessionCmd::Info { .. } => return None,
                }
            }
            Command::Serve(_) | Command::Login { .. } | Command::Sensor(_) | Command::Scenario(_) => return None,
        })
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if let ClientError::Api { body, .. } = &e {
                if !body.is_null() {
                    eprintln!("{}", render(body, cli.json));
                }
            }
            2
        }
    }
}

fn render<T: Serialize>(value: &T, compact: bool) -> String {
    if compact {
        serde_json::to_string(value)
    } else {
        serde_json::to_string_pretty(value)
    }
    .expect("responses serialise")
}

fn print<T: Serialize>(cli: &Cli, value: &T) {
    println!("{}", render(value, cli.json));
}

fn solutions_exit(solutions: &[WireSolution]) -> i32 {
    if solutions.iter().any(|s| s.success) {
        0
    } else {
        1
    }
}

fn client(cli: &Cli) -> Client {
    let mut endpoint = Endpoint::new(&cli.url);
    endpoint.token = cli.token.clone();
    Client::with_endpoint(endpoint)
}

fn run(cli: &Cli) -> Result<i32, ClientError> {
    let c = client(cli);
    match &cli.command {
        Command::Serve(args) => Ok(serve(args)),
        Command::Login { username, password } => {
            print(cli, &c.login(username, password)?);
            Ok(0)
        }
        Command::Config(cmd) => {
            match cmd {
                ConfigCmd::Get => print(cli, &c.get_configuration()?),
                ConfigCmd::Set { kb_mode, stateful, stateless, deadline } => {
                    let mut body = c.get_configuration()?;
                    if let Some(m) = kb_mode {
                        body.kb_mode = match m {
                            KbModeArg::Static => KbMode::Static,
                            KbModeArg::Dynamic => KbMode::Dynamic,
                        };
                    }
                    body.stateful_enabled = stateful.unwrap_or(body.stateful_enabled);
                    body.stateless_enabled = stateless.unwrap_or(body.stateless_enabled);
                    body.default_deadline_ms = deadline.unwrap_or(body.default_deadline_ms);
                    print(cli, &c.set_configuration(&body)?);
                }
                ConfigCmd::Reset => print(cli, &c.reset_configuration()?),
                ConfigCmd::Public => print(cli, &c.service_configuration()?),
            }
            Ok(0)
        }
        Command::Theory(cmd) => {
            match cmd {
                TheoryCmd::Get { admin: true, .. } => print(cli, &c.get_theory_timeline()?),
                TheoryCmd::Get { at, .. } => print(cli, &c.get_theory(*at)?),
                TheoryCmd::Set { file } => {
                    let text = if file.as_os_str() == "-" {
                        std::io::read_to_string(std::io::stdin())
                    } else {
                        std::fs::read_to_string(file)
                    }
                    .map_err(|e| ClientError::Protocol(format!("cannot read {}: {e}", file.display())))?;
                    print(cli, &c.set_theory(&text)?);
                }
            }
            Ok(0)
        }
        Command::Goals(cmd) => match cmd {
            GoalsCmd::Get { admin } => {
                print(cli, &if *admin { c.get_admin_goals()? } else { c.get_goals()? });
                Ok(0)
            }
            GoalsCmd::Set { goals } => {
                let goals: Vec<&str> = goals.iter().map(String::as_str).collect();
                print(cli, &c.set_goals(&goals)?);
                Ok(0)
            }
            GoalsCmd::Check { goal } => {
                let is_goal = c.is_goal(goal)?;
                print(cli, &serde_json::json!({ "goal": goal, "isGoal": is_goal }));
                Ok(if is_goal { 0 } else { 1 })
            }
        },
        Command::Solve { goal, count, after, within, at } => {
            let (mut mode, n_sol) = count.mode();
            if after.is_some() && mode == Mode::One {
                mode = Mode::After;
            }
            let body = SolveBody {
                goal: Some(goal.clone()),
                mode,
                n_sol,
                after_n: *after,
                within_ms: *within,
                at: *at,
                every_ms: None,
            };
            let solutions = c.solve_with(&body)?;
            print(cli, &serde_json::json!({ "solutions": solutions }));
            Ok(solutions_exit(&solutions))
        }
        Command::Session(cmd) => session(cli, &c, cmd),
        Command::Sensor(SensorCmd::Assert { fact, lease }) => {
            print(cli, &c.assert_fact(fact, *lease)?);
            Ok(0)
        }
        Command::Scenario(ScenarioCmd::SmartHouse { out }) => {
            let bin = std::env::current_exe().map_err(|e| ClientError::Protocol(e.to_string()))?;
            let transcript = scenario::smart_house(&bin).map_err(|e| ClientError::Protocol(e.to_string()))?;
            let text = transcript.text();
            print!("{text}");
            if let Some(path) = out {
                std::fs::write(path, &text).map_err(|e| ClientError::Protocol(format!("{}: {e}", path.display())))?;
            }
            Ok(0)
        }
    }
}

fn session(cli: &Cli, c: &Client, cmd: &SessionCmd) -> Result<i32, ClientError> {
    match cmd {
        SessionCmd::Open => {
            let s = c.open_session()?;
            print(cli, &serde_json::json!({ "session": s.id() }));
        }
        SessionCmd::Info { id } => print(cli, &c.session(id).info()?),
        SessionCmd::Goal { id, index, template } => {
            let s = c.session(id);
            let view = match (index, template) {
                (Some(i), _) => s.set_goal_index(*i)?,
                (None, Some(t)) => s.set_goal_template(t)?,
                (None, None) => unreachable!("clap requires one of them"),
            };
            print(cli, &view);
        }
        SessionCmd::Solve { id, count, within, at } => {
            let (mode, n_sol) = count.mode();
            let body = SolveBody { mode, n_sol, within_ms: *within, at: *at, ..Default::default() };
            let solutions = c.session(id).solve_with(&body)?;
            print(cli, &serde_json::json!({ "solutions": solutions }));
            return Ok(solutions_exit(&solutions));
        }
        SessionCmd::Stream { id, every, count, at, limit } => {
            let (mode, n_sol) = count.mode();
            let body = StreamBody { every_ms: *every, mode, n_sol, at: *at };
            let mut any_success = false;
            let stdout = std::io::stdout();
            for (i, record) in c.session(id).stream(&body)?.enumerate() {
                if limit.is_some_and(|l| i >= l) {
                    break;
                }
                let record = record?;
                any_success |= record.success;
                let mut out = stdout.lock();
                let _ = writeln!(out, "{}", render(&record, true));
                let _ = out.flush();
            }
            return Ok(if any_success { 0 } else { 1 });
        }
        SessionCmd::Pause { id } => print(cli, &c.session(id).pause()?),
        SessionCmd::Resume { id } => print(cli, &c.session(id).resume()?),
        SessionCmd::Reset { id } => print(cli, &c.session(id).reset()?),
        SessionCmd::Close { id } => print(cli, &c.session(id).close()?),
    }
    Ok(0)
}

fn serve(args: &ServeArgs) -> i32 {
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).try_init();
    let mut settings = match Settings::load(args.config.as_deref()) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    if let Some(listen) = args.listen {
        settings.listen = listen;
    }
    if let Some(store) = &args.store {
        settings.store = Some(store.clone());
    }
    if args.memory {
        settings.store = None;
    }
    let service = match server::build_service(&settings) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: cannot start: {e}");
            return 2;
        }
    };
    if let Some(notice) = service.startup_notice() {
        log::warn!("{notice}");
    }
    if settings.token_secret.is_none() {
        log::warn!("no token secret configured; tokens will not survive a restart");
    }
    let state = server::app_state(&settings, service);
    let runtime = match tokio::runtime::Builder::new_multi_thread().enable_all().build() {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let result = runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(settings.listen).await?;
        let addr = listener.local_addr()?;
        println!("listening on http://{addr}");
        let _ = std::io::stdout().flush();
        server::serve(
            listener,
            state,
            Duration::from_millis(settings.gc_interval_ms.max(1)),
            settings.kb_retention_ms,
            server::shutdown_signal(),
        )
        .await
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn clap_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn after_without_count_means_solve_after() {
        let cli = Cli::try_parse_from(["lpaas", "solve", "p(X)", "--after", "2"]).unwrap();
        assert_eq!(cli.command.operation().unwrap().method, "solveAfter");
    }
}
