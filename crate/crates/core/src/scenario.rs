//! Seeded infeasible queries with known causes, for exercising diagnosis
//! and repair.

use std::collections::BTreeSet;
use std::time::Duration;

use chrono::Days;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::data::{generate_synthetic, DataError, Database, SynthParams};
use crate::encoder::{cheapest_cost, solve_query, EncodingParams, PlanError, PlanOutcome, SolveLimits};
use crate::query::{Destination, LocalConstraint, Query, QueryField};
use crate::vocab::{FlightRule, Transportation, CATEGORIES};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cause {
    Budget,
    NonStop,
    Airline,
    Category,
}

impl Cause {
    pub const ALL: [Cause; 4] = [Cause::Budget, Cause::NonStop, Cause::Airline, Cause::Category];

    pub fn as_str(self) -> &'static str {
        match self {
            Cause::Budget => "budget",
            Cause::NonStop => "non-stop",
            Cause::Airline => "airline",
            Cause::Category => "category",
        }
    }

    /// Query field a user guarding this cause would refuse to change.
    pub fn field(self) -> QueryField {
        match self {
            Cause::Budget => QueryField::Budget,
            Cause::NonStop => QueryField::FlightRule,
            Cause::Airline => QueryField::Airlines,
            Cause::Category => QueryField::Categories,
        }
    }
}

impl std::str::FromStr for Cause {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "budget" => Ok(Cause::Budget),
            "non-stop" | "nonstop" => Ok(Cause::NonStop),
            "airline" => Ok(Cause::Airline),
            "category" => Ok(Cause::Category),
            _ => Err(format!("unknown cause {s:?}")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub id: usize,
    pub db_seed: u64,
    pub causes: Vec<Cause>,
    pub query: Query,
    /// The query with every cause removed; feasible by construction.
    pub base: Query,
    pub db: Database,
}

impl Scenario {
    pub fn name(&self) -> String {
        let causes: Vec<&str> = self.causes.iter().map(|c| c.as_str()).collect();
        format!("{:02}-{}", self.id, causes.join("+"))
    }

    pub fn multi_cause(&self) -> bool {
        self.causes.len() > 1
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error("no scenario with causes {0:?} found in {1} databases")]
    NotFound(Vec<Cause>, usize),
}

/// Database shape shared by the suites.
pub fn suite_params() -> SynthParams {
    SynthParams {
        cities_per_state: 6,
        flights_per_pair: (1, 3),
        flight_route_percent: 85,
        driving_percent: 50,
        restaurants_per_city: (2, 3),
        attractions_per_city: (2, 3),
        accommodations_per_city: (2, 3),
        nonstop_percent: 35,
        categories: CATEGORIES[..8].iter().map(|s| s.to_string()).collect(),
        house_rule_percent: 15,
        max_min_nights: 1,
        ..SynthParams::default()
    }
}

/// Solver limits used while building suites.
pub fn suite_limits() -> SolveLimits {
    SolveLimits {
        per_tuple: Duration::from_secs(20),
        total: Duration::from_secs(60),
        core_minimization: None,
        ..SolveLimits::default()
    }
}

const DB_ATTEMPTS: usize = 200;
const QUERY_ATTEMPTS: usize = 12;

struct Builder<'a> {
    params: &'a EncodingParams,
    limits: SolveLimits,
}

impl Builder<'_> {
    fn feasible(&self, q: &Query, db: &Database) -> Result<bool, ScenarioError> {
        Ok(matches!(solve_query(q, db, self.params, &self.limits)?, PlanOutcome::Delivered(_)))
    }

    fn infeasible(&self, q: &Query, db: &Database) -> Result<bool, ScenarioError> {
        Ok(matches!(solve_query(q, db, self.params, &self.limits)?, PlanOutcome::Infeasible(_)))
    }

    fn base_query(&self, rng: &mut ChaCha8Rng, db: &Database, synth: &SynthParams) -> Query {
        let cities: Vec<String> = db.cities().map(String::from).collect();
        let (days, k) = *[(3usize, 1usize), (5, 1), (5, 2)].choose(rng).expect("non-empty");
        let mut pool = cities.clone();
        pool.shuffle(rng);
        let org = pool[0].clone();
        let dest = pool[1..=k].to_vec();
        let offset = rng.gen_range(0..=synth.days - days) as u64;
        let start = synth.start_date + Days::new(offset);
        Query {
            org,
            dest: Destination::Cities(dest),
            visiting_city_number: k,
            days,
            date: (0..days as u64).map(|d| start + Days::new(d)).collect(),
            people_number: rng.gen_range(1..=3),
            local_constraint: LocalConstraint::default(),
            budget: Rational::from_integer(1_000_000),
            attractions_per_day: 1,
            meals_per_day: rng.gen_range(1..=2),
        }
    }

    /// Adds the non-budget causes to `q`; `None` when the database cannot
    /// host them for this query.
    fn inject(&self, rng: &mut ChaCha8Rng, db: &Database, q: &Query, causes: &[Cause]) -> Option<Query> {
        let mut out = q.clone();
        let lc = &mut out.local_constraint;
        for cause in causes {
            match cause {
                Cause::Budget => {}
                Cause::NonStop => {
                    lc.transportation = Some(Transportation::Flight);
                    lc.flight_rule = Some(FlightRule::NonStop);
                }
                Cause::Airline => {
                    lc.transportation = Some(Transportation::Flight);
                    let mut airlines: Vec<String> = db
                        .flights()
                        .iter()
                        .filter_map(|f| f.airline.clone())
                        .collect::<BTreeSet<_>>()
                        .into_iter()
                        .collect();
                    airlines.shuffle(rng);
                    lc.airlines = Some(airlines.into_iter().take(1).collect());
                }
                Cause::Category => {
                    let Destination::Cities(dest) = &q.dest else { return None };
                    let present = |c: &str, tag: &str| {
                        db.attractions_in(c).is_ok_and(|rows| rows.iter().any(|a| a.categories.contains(tag)))
                    };
                    let mut tags: Vec<&str> = CATEGORIES
                        .iter()
                        .copied()
                        .filter(|t| !dest.iter().any(|c| present(c, t)))
                        .filter(|t| db.cities().any(|c| c != q.org && !dest.iter().any(|d| d == c) && present(c, t)))
                        .collect();
                    tags.shuffle(rng);
                    let tag = tags.first()?;
                    lc.attraction_category = Some([tag.to_string()].into());
                }
            }
        }
        Some(out)
    }

    fn without(&self, q: &Query, base: &Query, cause: Cause) -> Query {
        let mut out = q.clone();
        let lc = &mut out.local_constraint;
        match cause {
            Cause::Budget => out.budget = base.budget,
            Cause::NonStop => lc.flight_rule = None,
            Cause::Airline => lc.airlines = None,
            Cause::Category => lc.attraction_category = None,
        }
        out
    }

    fn try_build(
        &self,
        rng: &mut ChaCha8Rng,
        db: &Database,
        synth: &SynthParams,
        causes: &[Cause],
    ) -> Result<Option<(Query, Query)>, ScenarioError> {
        let plain = self.base_query(rng, db, synth);
        let Some(mut query) = self.inject(rng, db, &plain, causes) else { return Ok(None) };
        // The base keeps the transportation restriction a flight cause relies on.
        let mut base = query.clone();
        for c in causes {
            base = self.without(&base, &plain, *c);
        }
        let Some(cheapest) = cheapest_cost(&base, db, self.params, &self.limits)? else { return Ok(None) };
        base.budget = Rational::from_integer(crate::num::ceil(&(cheapest * Rational::from_integer(2))));
        query.budget = if causes.contains(&Cause::Budget) {
            let factor = Rational::new(rng.gen_range(60..=90), 100);
            Rational::from_integer((cheapest * factor).floor().to_integer())
        } else {
            base.budget
        };
        if !self.feasible(&base, db)? || !self.infeasible(&query, db)? {
            return Ok(None);
        }
        if causes.len() > 1 {
            for c in causes {
                if !self.infeasible(&self.without(&query, &base, *c), db)? {
                    return Ok(None);
                }
            }
        }
        Ok(Some((query, base)))
    }
}

/// First scenario with `causes` over databases seeded from `seed` upward.
pub fn build_scenario(
    id: usize,
    seed: u64,
    causes: &[Cause],
    synth: &SynthParams,
    params: &EncodingParams,
) -> Result<Scenario, ScenarioError> {
    let builder = Builder { params, limits: suite_limits() };
    for attempt in 0..DB_ATTEMPTS as u64 {
        let db_seed = seed.wrapping_mul(1_000_003).wrapping_add(attempt);
        let db = generate_synthetic(db_seed, synth)?;
        let mut rng = ChaCha8Rng::seed_from_u64(db_seed ^ 0x5eed);
        for _ in 0..QUERY_ATTEMPTS {
            if let Some((query, base)) = builder.try_build(&mut rng, &db, synth, causes)? {
                return Ok(Scenario { id, db_seed, causes: causes.to_vec(), query, base, db });
            }
        }
    }
    Err(ScenarioError::NotFound(causes.to_vec(), DB_ATTEMPTS))
}

/// `count` (query, base) pairs sharing one database, for writing fixture
/// directories. Databases are seeded from `seed` upward until one hosts
/// `count` queries with `causes`; the database seed is returned too.
pub fn query_set(
    seed: u64,
    causes: &[Cause],
    count: usize,
    synth: &SynthParams,
    params: &EncodingParams,
) -> Result<(u64, Database, Vec<(Query, Query)>), ScenarioError> {
    let builder = Builder { params, limits: suite_limits() };
    for attempt in 0..DB_ATTEMPTS as u64 {
        let db_seed = seed.wrapping_mul(1_000_003).wrapping_add(attempt);
        let db = generate_synthetic(db_seed, synth)?;
        let mut rng = ChaCha8Rng::seed_from_u64(db_seed ^ 0x5eed);
        let mut found = Vec::new();
        for _ in 0..QUERY_ATTEMPTS * count.max(1) {
            if found.len() == count {
                break;
            }
            if let Some(pair) = builder.try_build(&mut rng, &db, synth, causes)? {
                found.push(pair);
            }
        }
        if found.len() == count {
            return Ok((db_seed, db, found));
        }
    }
    Err(ScenarioError::NotFound(causes.to_vec(), DB_ATTEMPTS))
}

fn build_suite(seed: u64, plan: &[Vec<Cause>]) -> Result<Vec<Scenario>, ScenarioError> {
    let synth = suite_params();
    let params = EncodingParams::default();
    plan.iter()
        .enumerate()
        .map(|(i, causes)| build_scenario(i, seed.wrapping_add(i as u64), causes, &synth, &params))
        .collect()
}

/// `count` single-cause scenarios cycling through the four causes.
pub fn core_suite(seed: u64, count: usize) -> Result<Vec<Scenario>, ScenarioError> {
    let plan: Vec<Vec<Cause>> = (0..count).map(|i| vec![Cause::ALL[i % Cause::ALL.len()]]).collect();
    build_suite(seed, &plan)
}

/// Pairs used for the multi-cause part of the repair suite.
pub const CAUSE_PAIRS: [[Cause; 2]; 4] = [
    [Cause::NonStop, Cause::Budget],
    [Cause::Category, Cause::Budget],
    [Cause::Airline, Cause::Category],
    [Cause::NonStop, Cause::Category],
];

/// `single` single-cause scenarios followed by `multi` two-cause ones.
pub fn repair_suite(seed: u64, single: usize, multi: usize) -> Result<Vec<Scenario>, ScenarioError> {
    let mut plan: Vec<Vec<Cause>> = (0..single).map(|i| vec![Cause::ALL[i % Cause::ALL.len()]]).collect();
    plan.extend((0..multi).map(|i| CAUSE_PAIRS[i % CAUSE_PAIRS.len()].to_vec()));
    build_suite(seed, &plan)
}
