use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::diagnose::{diagnose, Reason};
use super::provider::{apply_in_database, protected_by_feedback, ProviderError, SuggestContext, Suggestion, SuggestionProvider};
use crate::data::Database;
use crate::encoder::{solve_query, EncodingParams, PlanError, PlanOutcome, SolveLimits, TupleCore};
use crate::plan::Plan;
use crate::query::{Destination, Modification, Query, QueryError, QueryField};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Response {
    Agree,
    Disagree {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        feedback: Option<String>,
    },
    /// Free text: a modification in suggestion wording counts as a counter
    /// proposal, anything else as a refusal with feedback.
    Text { text: String },
    #[serde(alias = "modification")]
    Counter { modification: Modification },
    Abort,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    #[default]
    Full,
    /// The provider gets no diagnosed reasons.
    NoReason,
    /// Refusal feedback is discarded; refused modifications are still not
    /// offered again.
    NoFeedback,
    /// One batch of modifications is chosen without solver access and
    /// checked by a single solve.
    NoSolver,
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "full" => Ok(Variant::Full),
            "no-reason" => Ok(Variant::NoReason),
            "no-feedback" => Ok(Variant::NoFeedback),
            "no-solver" => Ok(Variant::NoSolver),
            _ => Err(format!("unknown variant {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairConfig {
    pub max_iterations: usize,
    pub action_cap: usize,
    pub variant: Variant,
    pub limits: SolveLimits,
    pub params: EncodingParams,
}

impl Default for RepairConfig {
    fn default() -> Self {
        RepairConfig {
            max_iterations: 10,
            action_cap: 15,
            variant: Variant::Full,
            limits: SolveLimits::default(),
            params: EncodingParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Outcome {
    Delivered {
        #[serde(with = "crate::query::amount")]
        cost: Rational,
    },
    Infeasible {
        reasons: usize,
    },
    TimedOut,
    Refused,
    Aborted,
    Inapplicable {
        error: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Iteration {
    pub index: usize,
    pub reasons: Vec<Reason>,
    pub suggestions: Vec<Suggestion>,
    pub response: Response,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SessionState {
    AwaitingResponse,
    Resolved,
    Exhausted,
    UserAborted,
    TimedOut,
    Failed,
}

impl SessionState {
    pub fn is_terminal(self) -> bool {
        self != SessionState::AwaitingResponse
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SessionState::AwaitingResponse => "awaiting-response",
            SessionState::Resolved => "resolved",
            SessionState::Exhausted => "exhausted",
            SessionState::UserAborted => "user-aborted",
            SessionState::TimedOut => "timed-out",
            SessionState::Failed => "failed",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SessionError {
    #[error("session is {}", .0.as_str())]
    Finished(SessionState),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Modification(#[from] QueryError),
}

#[derive(Debug, Clone, Serialize)]
pub struct RepairSession {
    pub original: Query,
    pub current: Query,
    pub state: SessionState,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub reasons: Vec<Reason>,
    /// Modifications awaiting a response.
    pub pending: Vec<Suggestion>,
    pub iterations: Vec<Iteration>,
    pub protected: BTreeSet<QueryField>,
    pub rejected: BTreeSet<Modification>,
    /// Applied modifications and the original destination list; never
    /// offered again so swaps cannot cycle.
    pub tried: BTreeSet<Modification>,
    pub feedback: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plan: Option<Plan>,
    #[serde(skip_serializing_if = "Option::is_none", with = "opt_amount")]
    pub cost: Option<Rational>,
    pub variant: Variant,
    #[serde(skip)]
    pub cores: Vec<TupleCore>,
    #[serde(skip)]
    config: RepairConfig,
}

mod opt_amount {
    use serde::Serializer;

    use crate::Rational;

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => crate::query::amount::serialize(r, s),
            None => s.serialize_none(),
        }
    }
}

impl RepairSession {
    /// Solves `query`; an infeasible query gets its first suggestion.
    pub fn start(
        query: Query,
        db: &Database,
        provider: &mut dyn SuggestionProvider,
        config: RepairConfig,
    ) -> Result<RepairSession, SessionError> {
        let mut s = RepairSession {
            original: query.clone(),
            current: query,
            state: SessionState::AwaitingResponse,
            note: None,
            reasons: Vec::new(),
            pending: Vec::new(),
            iterations: Vec::new(),
            protected: BTreeSet::new(),
            rejected: BTreeSet::new(),
            tried: BTreeSet::new(),
            feedback: Vec::new(),
            plan: None,
            cost: None,
            variant: config.variant,
            cores: Vec::new(),
            config,
        };
        if let Destination::Cities(list) = &s.original.dest {
            s.tried.insert(Modification::ChangeDestinations(list.clone()));
        }
        s.solve(db)?;
        if !s.state.is_terminal() {
            s.propose(db, provider);
        }
        Ok(s)
    }

    pub fn config(&self) -> &RepairConfig {
        &self.config
    }

    /// Every modification agreed to so far, in order.
    pub fn applied(&self) -> Vec<&Modification> {
        self.iterations
            .iter()
            .filter(|it| matches!(it.outcome, Outcome::Delivered { .. } | Outcome::Infeasible { .. } | Outcome::TimedOut))
            .flat_map(|it| match &it.response {
                Response::Counter { modification } => vec![modification],
                _ => it.suggestions.iter().map(|s| &s.modification).collect(),
            })
            .collect()
    }

    fn solve(&mut self, db: &Database) -> Result<Outcome, SessionError> {
        let outcome = solve_query(&self.current, db, &self.config.params, &self.config.limits)?;
        Ok(match outcome {
            PlanOutcome::Delivered(d) => {
                self.state = SessionState::Resolved;
                self.plan = Some(d.plan);
                self.cost = Some(d.cost);
                self.reasons.clear();
                self.cores.clear();
                Outcome::Delivered { cost: d.cost }
            }
            PlanOutcome::Infeasible(inf) => {
                self.reasons = diagnose(&inf.per_tuple);
                self.cores = inf.per_tuple;
                Outcome::Infeasible { reasons: self.reasons.len() }
            }
            PlanOutcome::Timeout(t) => {
                self.state = SessionState::TimedOut;
                self.note = Some(format!("solver gave up after {} ms", t.elapsed.as_millis()));
                Outcome::TimedOut
            }
        })
    }

    fn propose(&mut self, db: &Database, provider: &mut dyn SuggestionProvider) {
        self.pending.clear();
        if self.iterations.len() >= self.config.max_iterations {
            self.state = SessionState::Exhausted;
            self.note = Some(format!("no feasible query within {} iterations", self.config.max_iterations));
            return;
        }
        let variant = self.config.variant;
        if variant == Variant::NoSolver && !self.iterations.is_empty() {
            self.state = SessionState::Exhausted;
            self.note = Some("the modification batch did not restore feasibility".into());
            return;
        }
        let informed = matches!(variant, Variant::Full | Variant::NoFeedback);
        let no_feedback: Vec<String> = Vec::new();
        let excluded: BTreeSet<Modification> = self.rejected.union(&self.tried).cloned().collect();
        let ctx = SuggestContext {
            db,
            params: &self.config.params,
            limits: &self.config.limits,
            query: &self.current,
            reasons: informed.then_some(self.reasons.as_slice()),
            cores: if variant == Variant::NoSolver { &[] } else { &self.cores },
            protected: &self.protected,
            rejected: &excluded,
            feedback: if variant == Variant::NoFeedback { &no_feedback } else { &self.feedback },
            solver: variant != Variant::NoSolver,
            fallback: true,
            action_cap: self.config.action_cap,
        };
        let result =
            if variant == Variant::NoSolver { provider.suggest_batch(&ctx) } else { provider.suggest(&ctx).map(|s| vec![s]) };
        match result {
            Ok(batch) => self.pending = batch,
            Err(ProviderError::Exhausted(why)) => {
                self.state = SessionState::Exhausted;
                self.note = Some(why);
            }
            Err(ProviderError::Failure(why)) => {
                self.state = SessionState::Failed;
                self.note = Some(why);
            }
        }
    }

    /// Applies one response and, unless the session ends, proposes the next
    /// modification. A counter proposal that cannot be applied is an error
    /// and leaves the session unchanged.
    pub fn respond(
        &mut self,
        db: &Database,
        provider: &mut dyn SuggestionProvider,
        response: Response,
    ) -> Result<&Iteration, SessionError> {
        if self.state.is_terminal() {
            return Err(SessionError::Finished(self.state));
        }
        let response = match response {
            Response::Text { text } => match Modification::parse(&text) {
                Ok(modification) => Response::Counter { modification },
                Err(_) => Response::Disagree { feedback: Some(text) },
            },
            r => r,
        };
        let suggestions = std::mem::take(&mut self.pending);
        let outcome = match &response {
            Response::Agree | Response::Counter { .. } => {
                let mods: Vec<&Modification> = match &response {
                    Response::Counter { modification } => vec![modification],
                    _ => suggestions.iter().map(|s| &s.modification).collect(),
                };
                let mut next = self.current.clone();
                let mut failed = None;
                for m in mods.iter().copied() {
                    match apply_in_database(db, &next, m) {
                        Ok(q) => next = q,
                        Err(e) => {
                            failed = Some(e);
                            break;
                        }
                    }
                }
                match failed {
                    Some(e) if matches!(response, Response::Counter { .. }) => {
                        self.pending = suggestions;
                        return Err(e.into());
                    }
                    Some(e) => {
                        self.rejected.extend(suggestions.iter().map(|s| s.modification.clone()));
                        Outcome::Inapplicable { error: e.to_string() }
                    }
                    None => {
                        if let Response::Counter { modification } = &response {
                            self.protected.remove(&modification.field());
                        }
                        self.tried.extend(mods.into_iter().cloned());
                        self.current = next;
                        match self.solve(db) {
                            Ok(o) => o,
                            Err(e) => {
                                self.state = SessionState::Failed;
                                self.note = Some(e.to_string());
                                Outcome::Inapplicable { error: e.to_string() }
                            }
                        }
                    }
                }
            }
            Response::Disagree { feedback } => {
                self.rejected.extend(suggestions.iter().map(|s| s.modification.clone()));
                if self.config.variant != Variant::NoFeedback {
                    if let Some(text) = feedback {
                        self.feedback.push(text.clone());
                        let refused = suggestions.first().map(|s| &s.modification);
                        self.protected.extend(protected_by_feedback(text, refused));
                    }
                }
                Outcome::Refused
            }
            Response::Abort => {
                self.state = SessionState::UserAborted;
                Outcome::Aborted
            }
            Response::Text { .. } => unreachable!("text responses are normalized above"),
        };
        let index = self.iterations.len() + 1;
        let reasons = self.reasons.clone();
        self.iterations.push(Iteration { index, reasons, suggestions, response, outcome });
        if !self.state.is_terminal() {
            self.propose(db, provider);
        }
        Ok(self.iterations.last().expect("just pushed"))
    }

    pub fn transcript(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("sessions serialize")
    }
}

/// Simulated user.
pub trait Policy {
    fn respond(&mut self, session: &RepairSession) -> Response;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AlwaysAgree;

impl Policy for AlwaysAgree {
    fn respond(&mut self, _: &RepairSession) -> Response {
        Response::Agree
    }
}

/// Agrees unless a suggestion touches `field`, which it refuses to change.
#[derive(Debug, Clone, Copy)]
pub struct HardConstraint {
    pub field: QueryField,
}

pub const HARD_CONSTRAINT_FEEDBACK: &str = "I will not change this information";

impl Policy for HardConstraint {
    fn respond(&mut self, session: &RepairSession) -> Response {
        if session.pending.iter().any(|s| s.modification.field() == self.field) {
            Response::Disagree { feedback: Some(HARD_CONSTRAINT_FEEDBACK.into()) }
        } else {
            Response::Agree
        }
    }
}

/// Replays fixed responses, then aborts.
#[derive(Debug, Clone, Default)]
pub struct Scripted(pub VecDeque<Response>);

impl Policy for Scripted {
    fn respond(&mut self, _: &RepairSession) -> Response {
        self.0.pop_front().unwrap_or(Response::Abort)
    }
}

/// `agree`, `hard:<field>`, or `script:` followed by a JSON array of
/// responses.
pub fn policy_from_spec(spec: &str) -> Result<Box<dyn Policy + Send>, String> {
    if spec == "agree" {
        return Ok(Box::new(AlwaysAgree));
    }
    if let Some(f) = spec.strip_prefix("hard:") {
        let field = QueryField::parse(f).ok_or_else(|| format!("unknown query field {f:?}"))?;
        return Ok(Box::new(HardConstraint { field }));
    }
    if let Some(json) = spec.strip_prefix("script:") {
        let responses: Vec<Response> = serde_json::from_str(json).map_err(|e| e.to_string())?;
        return Ok(Box::new(Scripted(responses.into())));
    }
    Err(format!("unknown policy {spec:?}"))
}

/// Runs a session to a terminal state with `policy` answering.
pub fn run_session(
    query: Query,
    db: &Database,
    provider: &mut dyn SuggestionProvider,
    policy: &mut dyn Policy,
    config: RepairConfig,
) -> Result<RepairSession, SessionError> {
    let mut s = RepairSession::start(query, db, provider, config)?;
    while !s.state.is_terminal() {
        let r = policy.respond(&s);
        s.respond(db, provider, r)?;
    }
    Ok(s)
}

/// [`run_session`] under one ablation variant.
pub fn ablation_run(
    query: Query,
    db: &Database,
    provider: &mut dyn SuggestionProvider,
    policy: &mut dyn Policy,
    variant: Variant,
    config: RepairConfig,
) -> Result<RepairSession, SessionError> {
    run_session(query, db, provider, policy, RepairConfig { variant, ..config })
}
