use std::collections::BTreeSet;

use lpaas_core::access::{Principal, Role};
use lpaas_core::logic::{parse_term, parse_theory};
use lpaas_core::service::{
    transition, Action, FsmState, GoalSelector, Service, ServiceConfig, ServiceError, SolveRequest,
};

use Action::*;
use FsmState::*;

fn legal() -> BTreeSet<(FsmState, Action, FsmState)> {
    [
        (Ready, SetGoal, Ready),
        (Ready, Query, Run),
        (Ready, Close, NoGoalSelected),
        (Run, Suspend, Pause),
        (Pause, Query, Run),
        (Pause, Resume, Run),
        (Pause, Reset, Ready),
        (Pause, Close, NoGoalSelected),
    ]
    .into_iter()
    .collect()
}

#[test]
fn table_is_exactly_the_legal_set() {
    let mut seen = BTreeSet::new();
    for s in FsmState::ALL {
        for a in Action::ALL {
            if let Some(to) = transition(s, a) {
                seen.insert((s, a, to));
            }
        }
    }
    assert_eq!(seen, legal());
}

#[derive(Debug, Clone, Copy)]
enum Setup {
    Ready,
    Running,
    Paused,
    PausedStream,
}

#[derive(Debug, Clone, Copy)]
enum Op {
    SetGoal,
    Solve,
    Stream,
    Pause,
    Resume,
    Reset,
    Close,
}

const OPS: [Op; 7] = [Op::SetGoal, Op::Solve, Op::Stream, Op::Pause, Op::Resume, Op::Reset, Op::Close];

fn me() -> Principal {
    Principal::new("c", Role::Client)
}

fn prepare(setup: Setup) -> (Service, String) {
    let svc = Service::new();
    let admin = svc.admin(&Principal::new("a", Role::Configurator)).unwrap();
    admin
        .set_configuration(ServiceConfig { goal_list: vec![parse_term("p(X)").unwrap()], ..Default::default() })
        .unwrap();
    admin.set_theory(parse_theory("p(1). p(2). p(3).").unwrap()).unwrap();
    let id = svc.open_session(&me()).unwrap();
    svc.set_goal(&me(), &id, &GoalSelector::Index(1)).unwrap();
    let every = SolveRequest { every_ms: Some(60_000), ..Default::default() };
    match setup {
        Setup::Ready => {}
        Setup::Running => {
            svc.stream(&me(), &id, &every).unwrap();
        }
        Setup::Paused => {
            svc.solve_session(&me(), &id, &SolveRequest::default()).unwrap();
        }
        Setup::PausedStream => {
            svc.stream(&me(), &id, &every).unwrap();
            svc.pause(&me(), &id).unwrap();
        }
    }
    (svc, id)
}

fn apply(svc: &Service, id: &str, op: Op) -> Result<(), ServiceError> {
    let every = SolveRequest { every_ms: Some(60_000), ..Default::default() };
    match op {
        Op::SetGoal => svc.set_goal(&me(), id, &GoalSelector::Index(1)),
        Op::Solve => svc.solve_session(&me(), id, &SolveRequest::default()).map(drop),
        Op::Stream => svc.stream(&me(), id, &every).map(drop),
        Op::Pause => svc.pause(&me(), id),
        Op::Resume => svc.resume(&me(), id),
        Op::Reset => svc.reset(&me(), id),
        Op::Close => svc.close(&me(), id),
    }
}

/// Every operation from every reachable state either takes only legal steps
/// or is refused with IllegalTransition and leaves the session untouched.
#[test]
fn sessions_only_take_legal_steps() {
    let legal = legal();
    for setup in [Setup::Ready, Setup::Running, Setup::Paused, Setup::PausedStream] {
        for op in OPS {
            let (svc, id) = prepare(setup);
            let before = svc.session_info(&me(), &id).unwrap();
            let result = apply(&svc, &id, op);
            match (&result, svc.session_info(&me(), &id)) {
                (Err(ServiceError::IllegalTransition { state, action }), Ok(after)) => {
                    assert_eq!(*state, before.state, "{setup:?} {op:?}");
                    // resume also needs a paused stream to continue
                    let no_stream = matches!((setup, op), (Setup::Paused, Op::Resume));
                    assert!(transition(*state, *action).is_none() || no_stream, "{setup:?} {op:?}");
                    assert_eq!(after.history, before.history);
                    assert_eq!(after.state, before.state);
                }
                (Ok(()), Ok(after)) => {
                    for step in &after.history {
                        assert!(legal.contains(&(step.from, step.action, step.to)), "{setup:?} {op:?}: {step:?}");
                    }
                }
                (Ok(()), Err(ServiceError::SessionNotFound { .. })) => {
                    assert!(matches!(op, Op::Close));
                }
                other => panic!("{setup:?} {op:?}: {other:?}"),
            }
        }
    }
}

#[test]
fn specific_refusals() {
    let cases = [
        (Setup::Ready, Op::Pause, Ready, Suspend),
        (Setup::Ready, Op::Resume, Ready, Resume),
        (Setup::Running, Op::Solve, Run, Query),
        (Setup::Running, Op::Stream, Run, Query),
        (Setup::Running, Op::Resume, Run, Resume),
        (Setup::Paused, Op::Pause, Pause, Suspend),
        (Setup::Paused, Op::Resume, Pause, Resume),
        (Setup::PausedStream, Op::Pause, Pause, Suspend),
    ];
    for (setup, op, state, action) in cases {
        let (svc, id) = prepare(setup);
        assert_eq!(apply(&svc, &id, op), Err(ServiceError::IllegalTransition { state, action }), "{setup:?} {op:?}");
    }
}

#[test]
fn closed_sessions_accept_nothing() {
    for op in OPS {
        let (svc, id) = prepare(Setup::Paused);
        svc.close(&me(), &id).unwrap();
        assert!(matches!(apply(&svc, &id, op), Err(ServiceError::SessionNotFound { .. })), "{op:?}");
    }
}
