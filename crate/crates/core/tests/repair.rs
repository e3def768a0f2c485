use std::collections::VecDeque;

use tripsolve::encoder::EncodingParams;
use tripsolve::query::{Modification, QueryField};
use tripsolve::repair::{
    run_session, AlwaysAgree, RepairConfig, RepairSession, Response, RuleBasedProvider, Scripted, SessionError,
    SessionState, HARD_CONSTRAINT_FEEDBACK,
};
use tripsolve::scenario::{build_scenario, suite_limits, suite_params, Cause, Scenario};
use tripsolve::Rational;

fn scenario(causes: &[Cause], seed: u64) -> Scenario {
    build_scenario(0, seed, causes, &suite_params(), &EncodingParams::default()).unwrap()
}

fn config() -> RepairConfig {
    RepairConfig { limits: suite_limits(), ..RepairConfig::default() }
}

#[test]
fn agreeing_resolves_a_budget_case() {
    let s = scenario(&[Cause::Budget], 3);
    let r = run_session(s.query.clone(), &s.db, &mut RuleBasedProvider::default(), &mut AlwaysAgree, config()).unwrap();
    assert_eq!(r.state, SessionState::Resolved);
    assert!(r.plan.is_some() && r.cost.is_some());
    assert!(r.cost.unwrap() <= r.current.budget);
    assert!(r.applied().iter().all(|m| matches!(m, Modification::RaiseBudget(_))));
}

#[test]
fn refusal_with_feedback_protects_the_field() {
    let s = scenario(&[Cause::Budget], 3);
    let mut provider = RuleBasedProvider::default();
    let mut session = RepairSession::start(s.query.clone(), &s.db, &mut provider, config()).unwrap();
    assert_eq!(session.pending[0].modification.field(), QueryField::Budget);
    session
        .respond(&s.db, &mut provider, Response::Disagree { feedback: Some(HARD_CONSTRAINT_FEEDBACK.into()) })
        .unwrap();
    assert!(session.protected.contains(&QueryField::Budget));
    assert!(session.pending.iter().all(|p| p.modification.field() != QueryField::Budget));
}

#[test]
fn counter_proposal_is_applied() {
    let s = scenario(&[Cause::Budget], 3);
    let huge = Modification::RaiseBudget(s.query.budget * Rational::from_integer(50));
    let mut policy = Scripted(VecDeque::from([Response::Counter { modification: huge.clone() }]));
    let r = run_session(s.query.clone(), &s.db, &mut RuleBasedProvider::default(), &mut policy, config()).unwrap();
    assert_eq!(r.state, SessionState::Resolved);
    assert_eq!(r.applied(), vec![&huge]);
}

#[test]
fn abort_ends_the_session_and_later_responses_are_refused() {
    let s = scenario(&[Cause::NonStop], 4);
    let mut provider = RuleBasedProvider::default();
    let mut session = RepairSession::start(s.query.clone(), &s.db, &mut provider, config()).unwrap();
    session.respond(&s.db, &mut provider, Response::Abort).unwrap();
    assert_eq!(session.state, SessionState::UserAborted);
    assert!(matches!(
        session.respond(&s.db, &mut provider, Response::Agree),
        Err(SessionError::Finished(SessionState::UserAborted))
    ));
}

#[test]
fn zero_iterations_is_exhausted_at_once() {
    let s = scenario(&[Cause::Category], 5);
    let cfg = RepairConfig { max_iterations: 0, ..config() };
    let r = run_session(s.query.clone(), &s.db, &mut RuleBasedProvider::default(), &mut AlwaysAgree, cfg).unwrap();
    assert_eq!(r.state, SessionState::Exhausted);
    assert!(r.iterations.is_empty());
}

#[test]
fn transcripts_are_reproducible() {
    let s = scenario(&[Cause::Airline, Cause::Category], 6);
    let run = || {
        run_session(s.query.clone(), &s.db, &mut RuleBasedProvider::default(), &mut AlwaysAgree, config())
            .unwrap()
            .transcript()
            .to_string()
    };
    assert_eq!(run(), run());
}
