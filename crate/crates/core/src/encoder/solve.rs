use std::collections::BTreeSet;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use tripsolve_engine::{check, evaluate, minimize_core, CheckOptions, Model, ProgramError, SolveResult};

use super::build::{encode, Encoding};
use super::{enumerate_city_tuples, labels, EncodingParams};
use crate::data::{DataError, Database};
use crate::plan::{extract_plan, Plan};
use crate::query::Query;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveLimits {
    pub per_tuple: Duration,
    pub total: Duration,
    /// Minimize total cost within each tuple and keep the cheapest tuple.
    pub optimal: bool,
    pub parallel: bool,
    /// Time allowed for shrinking each unsat core; `None` keeps raw cores.
    pub core_minimization: Option<Duration>,
}

impl Default for SolveLimits {
    fn default() -> Self {
        SolveLimits {
            per_tuple: Duration::from_secs(30),
            total: Duration::from_secs(120),
            optimal: false,
            parallel: false,
            core_minimization: Some(Duration::from_secs(10)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleCore {
    pub tuple: Vec<String>,
    pub core: BTreeSet<String>,
    pub minimal: bool,
}

#[derive(Debug, Clone)]
pub struct Delivered {
    pub plan: Plan,
    pub tuple: Vec<String>,
    pub tuple_index: usize,
    pub model: Model,
    pub cost: Rational,
    pub encoding: Encoding,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Infeasible {
    /// Core of the last tuple tried, the one diagnosis works from.
    pub core: BTreeSet<String>,
    pub per_tuple: Vec<TupleCore>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedOut {
    pub elapsed: Duration,
    pub per_tuple: Vec<TupleCore>,
    pub checked: usize,
}

#[derive(Debug, Clone)]
pub enum PlanOutcome {
    Delivered(Box<Delivered>),
    Infeasible(Infeasible),
    Timeout(TimedOut),
}

impl PlanOutcome {
    pub fn delivered(&self) -> Option<&Delivered> {
        match self {
            PlanOutcome::Delivered(d) => Some(d),
            _ => None,
        }
    }

    pub fn infeasible(&self) -> Option<&Infeasible> {
        match self {
            PlanOutcome::Infeasible(i) => Some(i),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlanError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("invalid encoding parameters: {0}")]
    Params(String),
    #[error("malformed constraint program: {0}")]
    Program(#[from] ProgramError),
}

enum TupleResult {
    Sat { model: Model, cost: Rational, encoding: Encoding },
    Unsat(TupleCore),
    Timeout,
    Skipped,
}

fn spent(enc: &Encoding, model: &Model) -> Rational {
    *evaluate(model, &enc.terms.spent).expect("spent evaluates").as_num().expect("spent is numeric")
}

fn run_tuple(
    q: &Query,
    db: &Database,
    tuple: &[String],
    params: &EncodingParams,
    limits: &SolveLimits,
    deadline: Instant,
    cancel: Option<Arc<AtomicBool>>,
) -> Result<TupleResult, PlanError> {
    let now = Instant::now();
    if now >= deadline {
        return Ok(TupleResult::Timeout);
    }
    let mut enc = encode(q, db, tuple, params)?;
    if limits.optimal {
        enc.program.minimize(enc.terms.spent.clone());
    }
    let options = CheckOptions { time_limit: limits.per_tuple.min(deadline - now), cancel };
    Ok(match check(&enc.program, &options)? {
        SolveResult::Sat { model, .. } => {
            let cost = spent(&enc, &model);
            TupleResult::Sat { model, cost, encoding: enc }
        }
        SolveResult::Unsat { core } => {
            let (core, minimal) = match limits.core_minimization {
                Some(limit) => {
                    let limit = limit.min(deadline.saturating_duration_since(Instant::now()));
                    match minimize_core(&enc.program, &core, limit) {
                        Ok(m) => (m.labels, m.minimal),
                        Err(_) => (core, false),
                    }
                }
                None => (core, false),
            };
            TupleResult::Unsat(TupleCore { tuple: tuple.to_vec(), core, minimal })
        }
        SolveResult::Timeout { .. } => TupleResult::Timeout,
    })
}

/// Tries the ordered destination tuples of `q` and returns the first
/// feasible itinerary, or the cheapest one when `limits.optimal` is set.
pub fn solve_query(
    q: &Query,
    db: &Database,
    params: &EncodingParams,
    limits: &SolveLimits,
) -> Result<PlanOutcome, PlanError> {
    params.check().map_err(PlanError::Params)?;
    let start = Instant::now();
    let deadline = start + limits.total;
    let tuples = enumerate_city_tuples(db, q)?;
    if tuples.is_empty() {
        let core: BTreeSet<String> = [labels::CITY.to_string()].into();
        return Ok(PlanOutcome::Infeasible(Infeasible { core, per_tuple: Vec::new() }));
    }

    let results: Vec<TupleResult> = if limits.parallel {
        let flags: Vec<Arc<AtomicBool>> = tuples.iter().map(|_| Arc::new(AtomicBool::new(false))).collect();
        let first_sat = AtomicUsize::new(usize::MAX);
        tuples
            .par_iter()
            .enumerate()
            .map(|(i, tuple)| {
                if !limits.optimal && first_sat.load(Ordering::SeqCst) < i {
                    return Ok(TupleResult::Skipped);
                }
                let r = run_tuple(q, db, tuple, params, limits, deadline, Some(flags[i].clone()))?;
                if !limits.optimal && matches!(r, TupleResult::Sat { .. }) {
                    first_sat.fetch_min(i, Ordering::SeqCst);
                    for f in &flags[i + 1..] {
                        f.store(true, Ordering::SeqCst);
                    }
                }
                Ok(r)
            })
            .collect::<Result<_, PlanError>>()?
    } else {
        let mut out = Vec::with_capacity(tuples.len());
        for tuple in &tuples {
            let r = run_tuple(q, db, tuple, params, limits, deadline, None)?;
            let stop = !limits.optimal && matches!(r, TupleResult::Sat { .. });
            out.push(r);
            if stop {
                break;
            }
        }
        out
    };

    let mut best: Option<(usize, Model, Rational, Encoding)> = None;
    let mut cores = Vec::new();
    let mut timed_out = false;
    let mut checked = 0;
    for (i, r) in results.into_iter().enumerate() {
        match r {
            TupleResult::Sat { model, cost, encoding } => {
                checked += 1;
                if best.as_ref().is_none_or(|b| cost < b.2) {
                    best = Some((i, model, cost, encoding));
                }
                if !limits.optimal {
                    break;
                }
            }
            TupleResult::Unsat(c) => {
                checked += 1;
                cores.push(c);
            }
            TupleResult::Timeout => timed_out = true,
            TupleResult::Skipped => {}
        }
    }
    if let Some((tuple_index, model, cost, encoding)) = best {
        let plan = extract_plan(&encoding, &model, params);
        return Ok(PlanOutcome::Delivered(Box::new(Delivered {
            plan,
            tuple: encoding.tuple.clone(),
            tuple_index,
            model,
            cost,
            encoding,
        })));
    }
    if timed_out || cores.len() < tuples.len() {
        return Ok(PlanOutcome::Timeout(TimedOut { elapsed: start.elapsed(), per_tuple: cores, checked }));
    }
    let core = cores.last().map(|c| c.core.clone()).unwrap_or_default();
    Ok(PlanOutcome::Infeasible(Infeasible { core, per_tuple: cores }))
}

/// Lowest total cost of any itinerary for `q` with the budget dropped, or
/// `None` when no tuple is feasible even then. Tuples that time out are
/// ignored.
pub fn cheapest_cost(
    q: &Query,
    db: &Database,
    params: &EncodingParams,
    limits: &SolveLimits,
) -> Result<Option<Rational>, PlanError> {
    params.check().map_err(PlanError::Params)?;
    let deadline = Instant::now() + limits.total;
    let mut best: Option<Rational> = None;
    for tuple in enumerate_city_tuples(db, q)? {
        let now = Instant::now();
        if now >= deadline {
            break;
        }
        let enc = encode(q, db, &tuple, params)?;
        let mut program = enc.program.without_label(labels::BUDGET);
        program.minimize(enc.terms.spent.clone());
        let options = CheckOptions::with_limit(limits.per_tuple.min(deadline - now));
        if let SolveResult::Sat { objective_value: Some(v), .. } = check(&program, &options)? {
            if best.is_none_or(|b| v < b) {
                best = Some(v);
            }
        }
    }
    Ok(best)
}
