//! Interactive repair of infeasible queries: diagnosis from unsat cores,
//! database lookups, modification providers and the session loop.

mod collect;
mod diagnose;
mod provider;
mod session;

pub use collect::{
    collect, AccommodationInfo, AttractionInfo, CollectError, DrivingInfo, FlightInfo, InfoAction, InfoResult,
};
pub use diagnose::{diagnose, family_of, Context, Family, Reason};
pub use provider::{
    apply_in_database, estimate_cost, protected_by_feedback, ActionRecord, Probe, ProviderError, RuleBasedProvider, SuggestContext,
    Suggestion, SuggestionProvider,
};
pub use session::{
    ablation_run, policy_from_spec, run_session, AlwaysAgree, HardConstraint, Iteration, Outcome, Policy, RepairConfig,
    RepairSession, Response, Scripted, SessionError, SessionState, Variant, HARD_CONSTRAINT_FEEDBACK,
};
