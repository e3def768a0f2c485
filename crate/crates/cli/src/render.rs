//! JSON documents shared by the command line and the HTTP service, so both
//! print byte-identical results.

use serde_json::{json, Value};
use tripsolve::encoder::{PlanOutcome, TupleCore};
use tripsolve::query::amount;
use tripsolve::repair::diagnose;

fn cores(per_tuple: &[TupleCore]) -> Value {
    per_tuple
        .iter()
        .map(|c| json!({ "tuple": c.tuple, "core": c.core, "minimal": c.minimal }))
        .collect()
}

/// `status` is `delivered`, `infeasible` or `timeout`.
pub fn plan_outcome(outcome: &PlanOutcome) -> Value {
    match outcome {
        PlanOutcome::Delivered(d) => json!({
            "status": "delivered",
            "cost": amount::serialize(&d.cost, serde_json::value::Serializer).expect("amounts serialize"),
            "tuple": d.tuple,
            "plan": d.plan.to_json(),
        }),
        PlanOutcome::Infeasible(i) => json!({
            "status": "infeasible",
            "reasons": diagnose(&i.per_tuple),
            "core": i.core,
            "cores": cores(&i.per_tuple),
        }),
        PlanOutcome::Timeout(t) => json!({
            "status": "timeout",
            "checked": t.checked,
            "cores": cores(&t.per_tuple),
        }),
    }
}

pub fn to_text(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("values serialize")
}
