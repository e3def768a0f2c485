use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use serde::Serialize;

use super::collect::{collect, FlightInfo, InfoAction, InfoResult};
use super::diagnose::{Context, Family, Reason};
use crate::data::Database;
use crate::encoder::{cheapest_cost, enumerate_city_tuples, EncodingParams, Meal, SolveLimits, TupleCore};
use crate::num::ceil;
use crate::query::{apply_modification, Destination, LocalConstraint, Modification, Query, QueryError, QueryField};
use crate::vocab::{HouseRule, HouseType, RoomType, Transportation};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ActionRecord {
    pub action: InfoAction,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<InfoResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Suggestion {
    pub modification: Modification,
    pub rationale: String,
    pub actions: Vec<ActionRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProviderError {
    #[error("no untried modification left: {0}")]
    Exhausted(String),
    #[error("suggestion provider failed: {0}")]
    Failure(String),
}

/// What a provider may look at when asked for the next modification.
#[derive(Debug, Clone, Copy)]
pub struct SuggestContext<'a> {
    pub db: &'a Database,
    pub params: &'a EncodingParams,
    pub limits: &'a SolveLimits,
    pub query: &'a Query,
    /// `None` when diagnosis is withheld.
    pub reasons: Option<&'a [Reason]>,
    pub cores: &'a [TupleCore],
    pub protected: &'a BTreeSet<QueryField>,
    /// Modifications never to offer again.
    pub rejected: &'a BTreeSet<Modification>,
    pub feedback: &'a [String],
    /// Whether the provider may run the solver itself.
    pub solver: bool,
    /// Whether a blind destination swap may be proposed when nothing else
    /// applies.
    pub fallback: bool,
    pub action_cap: usize,
}

impl SuggestContext<'_> {
    /// Grammar-legal, not rejected, not protected, and an actual change.
    pub fn admissible(&self, m: &Modification) -> bool {
        !self.rejected.contains(m)
            && !self.protected.contains(&m.field())
            && apply_in_database(self.db, self.query, m).is_ok_and(|next| next != *self.query)
    }
}

/// [`apply_modification`] plus the checks that need the database: new
/// destinations must be cities it knows.
pub fn apply_in_database(db: &Database, q: &Query, m: &Modification) -> Result<Query, QueryError> {
    if let Modification::ChangeDestinations(cities) = m {
        if let Some(c) = cities.iter().find(|c| !db.has_city(c)) {
            return Err(QueryError::Inapplicable(m.to_string(), format!("unknown city {c:?}")));
        }
    }
    apply_modification(q, m)
}

pub trait SuggestionProvider {
    fn name(&self) -> &str;

    fn suggest(&mut self, ctx: &SuggestContext<'_>) -> Result<Suggestion, ProviderError>;

    /// Several modifications chosen up front with no solver feedback in
    /// between. The default asks once.
    fn suggest_batch(&mut self, ctx: &SuggestContext<'_>) -> Result<Vec<Suggestion>, ProviderError> {
        self.suggest(ctx).map(|s| vec![s])
    }
}

/// Runs info actions under a per-suggestion cap, answering repeats from the
/// log.
pub struct Probe<'a> {
    db: &'a Database,
    cap: usize,
    pub records: Vec<ActionRecord>,
}

impl<'a> Probe<'a> {
    pub fn new(db: &'a Database, cap: usize) -> Self {
        Probe { db, cap, records: Vec::new() }
    }

    /// `None` once the cap is reached or when the action fails.
    pub fn ask(&mut self, action: InfoAction) -> Option<InfoResult> {
        if let Some(r) = self.records.iter().find(|r| r.action == action) {
            return r.result.clone();
        }
        if self.records.len() >= self.cap {
            return None;
        }
        let (result, error) = match collect(&action, self.db) {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e.to_string())),
        };
        self.records.push(ActionRecord { action, result: result.clone(), error });
        result
    }
}

/// Deterministic provider driven by reasons and database lookups.
#[derive(Debug, Clone)]
pub struct RuleBasedProvider {
    /// Factor applied to the cheapest cost when raising the budget.
    pub headroom: Rational,
    /// Most modifications returned by one batch.
    pub batch_limit: usize,
    /// Alternative destination lists priced when the budget is protected.
    pub pivot_limit: usize,
}

impl Default for RuleBasedProvider {
    fn default() -> Self {
        RuleBasedProvider { headroom: Rational::new(21, 20), batch_limit: 5, pivot_limit: 8 }
    }
}

/// Requirements a replacement destination must meet.
#[derive(Debug, Clone, Default)]
struct Need {
    categories: Vec<String>,
    cuisines: Vec<String>,
    house_type: Option<HouseType>,
    house_rule: Option<HouseRule>,
}

/// Flights and road link of one leg over its possible departure dates.
#[derive(Debug, Clone, Default)]
struct LegFacts {
    from: String,
    to: String,
    flights: Vec<FlightInfo>,
    driving: bool,
    complete: bool,
}

fn flight_ok(f: &FlightInfo, lc: &LocalConstraint) -> bool {
    (lc.flight_rule.is_none() || f.nonstop == Some(true))
        && lc.airlines.as_ref().is_none_or(|a| f.airline.as_ref().is_some_and(|x| a.contains(x)))
}

impl LegFacts {
    fn usable(&self, lc: &LocalConstraint) -> bool {
        let fly = lc.transportation != Some(Transportation::NoFlight) && self.flights.iter().any(|f| flight_ok(f, lc));
        let ground = lc.transportation != Some(Transportation::Flight) && self.driving;
        fly || ground
    }
}

fn leg_dates(q: &Query, leg: usize) -> Vec<NaiveDate> {
    let (n, k) = (q.date.len(), q.k());
    if leg == 0 {
        q.date[..1].to_vec()
    } else if leg == k {
        q.date[n - 1..].to_vec()
    } else if n > 2 {
        q.date[1..n - 1].to_vec()
    } else {
        Vec::new()
    }
}

fn stops(q: &Query, tuple: &[String]) -> Vec<String> {
    let mut s = vec![q.org.clone()];
    s.extend(tuple.iter().cloned());
    s.push(q.org.clone());
    s
}

fn leg_facts(probe: &mut Probe, q: &Query, tuple: &[String], leg: usize) -> LegFacts {
    let s = stops(q, tuple);
    let (from, to) = (s[leg].clone(), s[leg + 1].clone());
    let mut facts = LegFacts { from: from.clone(), to: to.clone(), complete: true, ..Default::default() };
    for date in leg_dates(q, leg) {
        match probe.ask(InfoAction::FlightCheck { from: from.clone(), to: to.clone(), date }) {
            Some(r) => facts.flights.extend(r.flights().iter().cloned()),
            None => facts.complete = false,
        }
    }
    match probe.ask(InfoAction::DrivingCheck { from, to }) {
        Some(r) => facts.driving = r.feasible(),
        None => facts.complete = false,
    }
    facts
}

fn dest_list(q: &Query) -> Option<&[String]> {
    match &q.dest {
        Destination::Cities(c) => Some(c),
        Destination::State(_) => None,
    }
}

fn accepted_types(t: HouseType) -> Vec<RoomType> {
    RoomType::ALL.into_iter().filter(|r| t.accepts(*r)).collect()
}

type Candidate = (Modification, String);

impl RuleBasedProvider {
    fn pick(&self, ctx: &SuggestContext<'_>, cands: Vec<Candidate>) -> Option<Candidate> {
        cands.into_iter().find(|(m, _)| ctx.admissible(m))
    }

    /// Tuples to inspect for a leg-level reason: the ones whose core holds
    /// the label, else the first candidate tuples.
    fn tuples_for(&self, ctx: &SuggestContext<'_>, label: Option<&str>) -> Vec<Vec<String>> {
        if let Some(l) = label {
            let hit: Vec<Vec<String>> =
                ctx.cores.iter().filter(|c| c.core.contains(l)).map(|c| c.tuple.clone()).take(2).collect();
            if !hit.is_empty() {
                return hit;
            }
        }
        enumerate_city_tuples(ctx.db, ctx.query).map(|t| t.into_iter().take(2).collect()).unwrap_or_default()
    }

    /// Candidate destination lists meeting `need`, nearest in table order.
    fn swaps(&self, ctx: &SuggestContext<'_>, probe: &mut Probe, need: &Need) -> Vec<Vec<String>> {
        let q = ctx.query;
        let mut pool: Vec<String> = ctx.db.cities().filter(|c| *c != q.org).map(String::from).collect();
        let mut keep = |allowed: Option<Vec<String>>| {
            if let Some(a) = allowed {
                pool.retain(|c| a.contains(c));
            }
        };
        for tag in &need.categories {
            keep(probe.ask(InfoAction::CategorySearch { category: tag.clone() }).map(|r| r.cities().to_vec()));
        }
        for tag in &need.cuisines {
            keep(probe.ask(InfoAction::CuisineSearch { cuisine: tag.clone() }).map(|r| r.cities().to_vec()));
        }
        if let Some(t) = need.house_type {
            let mut ok = Vec::new();
            for r in accepted_types(t) {
                if let Some(res) = probe.ask(InfoAction::TypeSearch { room_type: r }) {
                    ok.extend(res.cities().iter().cloned());
                }
            }
            keep(Some(ok));
        }
        let mut reach: BTreeSet<String> = BTreeSet::new();
        let mut reach_known = false;
        if let Some(r) = probe.ask(InfoAction::DrivingSearchFrom { from: q.org.clone() }) {
            reach.extend(r.cities().iter().cloned());
            reach_known = true;
        }
        if let Some(r) = probe.ask(InfoAction::FlightSearchFrom { from: q.org.clone(), date: q.date[0] }) {
            reach.extend(r.cities().iter().cloned());
            reach_known = true;
        }
        if reach_known {
            pool.retain(|c| reach.contains(c));
        }
        if let Some(rule) = need.house_rule {
            let mut ok = Vec::new();
            for c in &pool {
                if let Some(InfoResult::Accommodations(rows)) =
                    probe.ask(InfoAction::AccommodationTypesIn { city: c.clone() })
                {
                    if rows.iter().any(|a| !a.house_rules.contains(&rule)) {
                        ok.push(c.clone());
                    }
                }
            }
            pool = ok;
        }
        let k = q.k();
        let mut out = Vec::new();
        match dest_list(q) {
            Some(list) => {
                let lacking: Vec<usize> =
                    (0..list.len()).filter(|&j| !pool.contains(&list[j])).collect();
                let order: Vec<usize> = if lacking.is_empty() { (0..list.len()).collect() } else { lacking };
                for z in pool.iter().filter(|z| !list.contains(z)) {
                    for &j in &order {
                        let mut next = list.to_vec();
                        next[j] = z.clone();
                        out.push(next);
                    }
                }
            }
            None => {
                for start in 0..pool.len().saturating_sub(k - 1) {
                    out.push(pool[start..start + k].to_vec());
                }
            }
        }
        out
    }

    fn swap_candidates(&self, ctx: &SuggestContext<'_>, probe: &mut Probe, need: &Need, why: &str) -> Vec<Candidate> {
        self.swaps(ctx, probe, need)
            .into_iter()
            .map(|list| (Modification::ChangeDestinations(list), why.to_string()))
            .collect()
    }

    fn budget(&self, ctx: &SuggestContext<'_>, probe: &mut Probe) -> Option<Candidate> {
        let q = ctx.query;
        let cheapest = if ctx.solver {
            cheapest_cost(q, ctx.db, ctx.params, ctx.limits).ok().flatten()
        } else {
            estimate_cost(q, ctx.db, ctx.params)
        };
        if let Some(c) = cheapest {
            let target = Rational::from_integer(ceil(&(c * self.headroom)));
            if target > q.budget {
                let why = if ctx.solver {
                    format!("the cheapest itinerary without the budget limit costs {}", crate::num::format_rational(&c))
                } else {
                    format!("a rough lower estimate of the trip cost is {}", crate::num::format_rational(&c))
                };
                if let Some(c) = self.pick(ctx, vec![(Modification::RaiseBudget(target), why)]) {
                    return Some(c);
                }
            }
        }
        if !ctx.solver {
            return None;
        }
        let lists = self.swaps(ctx, probe, &Need::default());
        for list in lists.into_iter().take(self.pivot_limit) {
            let m = Modification::ChangeDestinations(list);
            if !ctx.admissible(&m) {
                continue;
            }
            let next = apply_modification(q, &m).ok()?;
            if let Ok(Some(cost)) = cheapest_cost(&next, ctx.db, ctx.params, ctx.limits) {
                if cost <= q.budget {
                    let why = format!(
                        "these destinations fit the current budget, the cheapest itinerary costs {}",
                        crate::num::format_rational(&cost)
                    );
                    return Some((m, why));
                }
            }
        }
        None
    }

    /// Candidates for one reason; empty when the evidence does not point
    /// at an edit.
    fn for_reason(
        &self,
        ctx: &SuggestContext<'_>,
        probe: &mut Probe,
        family: Family,
        context: Option<&Context>,
        label: Option<&str>,
    ) -> Option<Candidate> {
        let q = ctx.query;
        let lc = &q.local_constraint;
        let leg = match context {
            Some(Context::Leg(i)) => Some(*i),
            _ => None,
        };
        let tag = match context {
            Some(Context::Tag(t)) => Some(t.clone()),
            _ => None,
        };
        let legs_of = |probe: &mut Probe| -> Vec<LegFacts> {
            let mut out = Vec::new();
            for t in self.tuples_for(ctx, label) {
                match leg {
                    Some(i) if i <= t.len() => out.push(leg_facts(probe, q, &t, i)),
                    Some(_) => {}
                    None => (0..=t.len()).for_each(|i| out.push(leg_facts(probe, q, &t, i))),
                }
            }
            out
        };
        match family {
            Family::FlightAvailability | Family::DrivingAvailability => {
                let facts = legs_of(probe);
                let broken: Vec<&LegFacts> = facts.iter().filter(|f| f.complete && !f.usable(lc)).collect();
                if broken.is_empty() {
                    return None;
                }
                let b = broken[0];
                let mut cands = Vec::new();
                let relaxed = LocalConstraint { transportation: None, ..lc.clone() };
                if lc.transportation.is_some() && b.usable(&relaxed) {
                    let why = format!("the transportation constraint leaves no way from {} to {}", b.from, b.to);
                    cands.push((Modification::RemoveTransportation, why));
                }
                let why = format!("no usable connection from {} to {} on the trip dates", b.from, b.to);
                cands.extend(self.swap_candidates(ctx, probe, &Need::default(), &why));
                self.pick(ctx, cands)
            }
            Family::NonStop => {
                lc.flight_rule?;
                let facts = legs_of(probe);
                let nonstop = facts.iter().flat_map(|f| &f.flights).filter(|f| f.nonstop == Some(true)).count();
                let total: usize = facts.iter().map(|f| f.flights.len()).sum();
                let why = format!("{nonstop} of {total} flights on the affected legs are non-stop");
                self.pick(ctx, vec![(Modification::RemoveFlightRule, why)])
            }
            Family::Airline => {
                let current = lc.airlines.clone()?;
                let facts = legs_of(probe);
                let operating: BTreeSet<String> =
                    facts.iter().flat_map(|f| &f.flights).filter_map(|f| f.airline.clone()).collect();
                let mut cands = Vec::new();
                if !operating.is_subset(&current) {
                    let merged: BTreeSet<String> = current.union(&operating).cloned().collect();
                    let names: Vec<String> = operating.iter().cloned().collect();
                    let why = format!("the affected legs are flown by {}", names.join(", "));
                    cands.push((Modification::ChangeAirlines(merged), why));
                }
                if lc.transportation == Some(Transportation::Flight) && facts.iter().any(|f| f.driving) {
                    cands.push((Modification::RemoveTransportation, "the legs can be driven instead".into()));
                }
                self.pick(ctx, cands)
            }
            Family::TransportMethod => {
                let t = lc.transportation?;
                leg?;
                let facts = legs_of(probe);
                let relaxed = LocalConstraint { transportation: None, ..lc.clone() };
                let b = facts.iter().find(|f| f.complete && !f.usable(lc) && f.usable(&relaxed))?;
                let why = format!("the {} constraint leaves no way from {} to {}", t.as_str(), b.from, b.to);
                self.pick(ctx, vec![(Modification::RemoveTransportation, why)])
            }
            Family::Category => {
                let tag = tag?;
                let current = lc.attraction_category.clone()?;
                let need = Need { categories: vec![tag.clone()], ..Default::default() };
                let mut cands =
                    self.swap_candidates(ctx, probe, &need, &format!("the new destination has a {tag} attraction"));
                let rest: BTreeSet<String> = current.iter().filter(|c| **c != tag).cloned().collect();
                cands.push((Modification::ChangeCategories(rest), format!("no reachable city offers {tag}")));
                self.pick(ctx, cands)
            }
            Family::Cuisine => {
                let tag = tag?;
                let current = lc.cuisines.clone()?;
                let need = Need { cuisines: vec![tag.clone()], ..Default::default() };
                let mut cands =
                    self.swap_candidates(ctx, probe, &need, &format!("the new destination has a {tag} restaurant"));
                let rest: BTreeSet<String> = current.iter().filter(|c| **c != tag).cloned().collect();
                cands.push((Modification::ChangeCuisines(rest), format!("no reachable city serves {tag} food")));
                self.pick(ctx, cands)
            }
            Family::HouseType => {
                let t = lc.house_type?;
                let need = Need { house_type: Some(t), ..Default::default() };
                let mut cands =
                    self.swap_candidates(ctx, probe, &need, &format!("the new destination has {} listings", t.as_str()));
                cands.push((Modification::RemoveHouseType, format!("no {} listing fits the trip", t.as_str())));
                self.pick(ctx, cands)
            }
            Family::HouseRule => {
                let rule = lc.house_rule?;
                let need = Need { house_rule: Some(rule), ..Default::default() };
                let why = format!("the new destination has listings without the rule {}", rule.prohibition());
                let cands = self.swap_candidates(ctx, probe, &need, &why);
                self.pick(ctx, cands)
            }
            Family::Budget => self.budget(ctx, probe),
            Family::MinimumNights | Family::Dates | Family::Other => None,
        }
    }

    /// Reasons inferred from lookups alone, for when diagnosis is withheld.
    fn suspects(&self, ctx: &SuggestContext<'_>, probe: &mut Probe) -> Vec<(Family, Option<Context>)> {
        let q = ctx.query;
        let lc = &q.local_constraint;
        let mut out = Vec::new();
        let tuples = self.tuples_for(ctx, None);
        let facts: Vec<Vec<LegFacts>> =
            tuples.iter().map(|t| (0..=t.len()).map(|i| leg_facts(probe, q, t, i)).collect()).collect();
        let route_ok = |lc: &LocalConstraint| facts.iter().any(|legs| legs.iter().all(|f| f.usable(lc)));
        if !facts.is_empty() && !route_ok(lc) {
            let without = |f: &dyn Fn(&mut LocalConstraint)| {
                let mut c = lc.clone();
                f(&mut c);
                route_ok(&c)
            };
            if lc.flight_rule.is_some() && without(&|c| c.flight_rule = None) {
                out.push((Family::NonStop, None));
            }
            if lc.airlines.is_some() && without(&|c| c.airlines = None) {
                out.push((Family::Airline, None));
            }
            if lc.transportation.is_some() && without(&|c| c.transportation = None) {
                out.push((Family::TransportMethod, Some(Context::Leg(0))));
            }
            out.push((Family::FlightAvailability, None));
        }
        let dests: Vec<String> = tuples.first().cloned().unwrap_or_default();
        for tag in lc.attraction_category.iter().flatten() {
            if let Some(r) = probe.ask(InfoAction::CategorySearch { category: tag.clone() }) {
                if !dests.iter().any(|c| r.cities().contains(c)) {
                    out.push((Family::Category, Some(Context::Tag(tag.clone()))));
                }
            }
        }
        for tag in lc.cuisines.iter().flatten() {
            if let Some(r) = probe.ask(InfoAction::CuisineSearch { cuisine: tag.clone() }) {
                if !dests.iter().any(|c| r.cities().contains(c)) {
                    out.push((Family::Cuisine, Some(Context::Tag(tag.clone()))));
                }
            }
        }
        if let Some(t) = lc.house_type {
            let mut ok = BTreeSet::new();
            for r in accepted_types(t) {
                if let Some(res) = probe.ask(InfoAction::TypeSearch { room_type: r }) {
                    ok.extend(res.cities().iter().cloned());
                }
            }
            if dests.iter().any(|c| !ok.contains(c)) {
                out.push((Family::HouseType, Some(Context::Tag(t.as_str().into()))));
            }
        }
        if let Some(rule) = lc.house_rule {
            for c in &dests {
                if let Some(InfoResult::Accommodations(rows)) =
                    probe.ask(InfoAction::AccommodationTypesIn { city: c.clone() })
                {
                    if rows.iter().all(|a| a.house_rules.contains(&rule)) {
                        out.push((Family::HouseRule, Some(Context::Tag(rule.prohibition()))));
                        break;
                    }
                }
            }
        }
        out.push((Family::Budget, None));
        out
    }

    fn next(&self, ctx: &SuggestContext<'_>, probe: &mut Probe) -> Option<Candidate> {
        if let Some(reasons) = ctx.reasons {
            for r in reasons {
                if let Some(c) = self.for_reason(ctx, probe, r.family, r.context.as_ref(), Some(&r.label)) {
                    return Some(c);
                }
            }
        }
        for (family, context) in self.suspects(ctx, probe) {
            if let Some(c) = self.for_reason(ctx, probe, family, context.as_ref(), None) {
                return Some(c);
            }
        }
        if ctx.fallback {
            let cands = self.swap_candidates(ctx, probe, &Need::default(), "trying other destinations");
            return self.pick(ctx, cands);
        }
        None
    }
}

impl SuggestionProvider for RuleBasedProvider {
    fn name(&self) -> &str {
        "rule-based"
    }

    fn suggest(&mut self, ctx: &SuggestContext<'_>) -> Result<Suggestion, ProviderError> {
        let mut probe = Probe::new(ctx.db, ctx.action_cap);
        match self.next(ctx, &mut probe) {
            Some((modification, rationale)) => Ok(Suggestion { modification, rationale, actions: probe.records }),
            None => Err(ProviderError::Exhausted("no admissible modification found".into())),
        }
    }

    fn suggest_batch(&mut self, ctx: &SuggestContext<'_>) -> Result<Vec<Suggestion>, ProviderError> {
        let mut query = ctx.query.clone();
        let mut rejected = ctx.rejected.clone();
        let mut out: Vec<Suggestion> = Vec::new();
        while out.len() < self.batch_limit {
            let local = SuggestContext {
                query: &query,
                reasons: None,
                cores: &[],
                rejected: &rejected,
                fallback: out.is_empty() && ctx.fallback,
                ..*ctx
            };
            let Ok(s) = self.suggest(&local) else { break };
            let Ok(next) = apply_modification(&query, &s.modification) else { break };
            rejected.insert(s.modification.clone());
            query = next;
            out.push(s);
        }
        if out.is_empty() {
            return Err(ProviderError::Exhausted("no admissible modification found".into()));
        }
        Ok(out)
    }
}

/// Lower estimate of the trip cost read straight from the tables: cheapest
/// admissible option for every leg, meal slot and night, ignoring the
/// interactions the solver would enforce. `None` when some tuple leg has no
/// option at all in every tuple.
pub fn estimate_cost(q: &Query, db: &Database, params: &EncodingParams) -> Option<Rational> {
    let lc = &q.local_constraint;
    let people = Rational::from_integer(q.people_number as i64);
    let n = q.days as i64;
    let tuples = enumerate_city_tuples(db, q).ok()?;
    let mut best: Option<Rational> = None;
    'tuples: for tuple in tuples {
        let s = stops(q, &tuple);
        let mut total = Rational::from_integer(0);
        for leg in 0..=tuple.len() {
            let (from, to) = (&s[leg], &s[leg + 1]);
            let mut options = Vec::new();
            if lc.transportation != Some(Transportation::NoFlight) {
                for d in leg_dates(q, leg) {
                    for f in db.flight_table(from, to, d).ok()? {
                        let info = FlightInfo {
                            origin: f.origin.clone(),
                            destination: f.destination.clone(),
                            date: f.date,
                            departure: String::new(),
                            arrival: String::new(),
                            airline: f.airline.clone(),
                            nonstop: f.nonstop,
                            price: f.price,
                        };
                        if flight_ok(&info, lc) {
                            options.push(f.price * people);
                        }
                    }
                }
            }
            if let Some(d) = db.driving_lookup(from, to).ok()? {
                match lc.transportation {
                    Some(Transportation::Flight) => {}
                    Some(Transportation::NoSelfDriving) => options.push(params.taxi_cost(&d.distance_km, q.people_number)),
                    _ => {
                        options.push(params.taxi_cost(&d.distance_km, q.people_number));
                        options.push(params.self_driving_cost(&d.distance_km, q.people_number));
                    }
                }
            }
            match options.into_iter().min() {
                Some(c) => total += c,
                None => continue 'tuples,
            }
        }
        let meal_slots = Meal::schedule(q.meals_per_day).len() as i64 * (n - 2).max(0);
        let mut cheapest_meal: Option<Rational> = None;
        let mut cheapest_night: Option<Rational> = None;
        for c in &tuple {
            for r in db.restaurants_in(c).ok()? {
                cheapest_meal = Some(cheapest_meal.map_or(r.avg_cost, |m: Rational| m.min(r.avg_cost)));
            }
            for a in db.accommodations_in(c).ok()? {
                if lc.house_type.is_some_and(|t| !t.accepts(a.room_type))
                    || lc.house_rule.is_some_and(|r| a.house_rules.contains(&r))
                {
                    continue;
                }
                let night = a.price * Rational::from_integer(params.rooms(q.people_number, a.max_occupancy));
                cheapest_night = Some(cheapest_night.map_or(night, |m: Rational| m.min(night)));
            }
        }
        total += cheapest_meal.unwrap_or_default() * people * Rational::from_integer(meal_slots);
        total += cheapest_night.unwrap_or_default() * Rational::from_integer((n - 1).max(0));
        if best.is_none_or(|b| total < b) {
            best = Some(total);
        }
    }
    best
}

/// Field names mentioned in free-text feedback; an unspecific refusal
/// protects the field of the refused modification.
pub fn protected_by_feedback(text: &str, refused: Option<&Modification>) -> BTreeSet<QueryField> {
    let t = text.to_ascii_lowercase();
    let keywords: BTreeMap<&str, QueryField> = [
        ("budget", QueryField::Budget),
        ("money", QueryField::Budget),
        ("destination", QueryField::Destinations),
        ("cities", QueryField::Destinations),
        ("city", QueryField::Destinations),
        ("non-stop", QueryField::FlightRule),
        ("nonstop", QueryField::FlightRule),
        ("airline", QueryField::Airlines),
        ("categor", QueryField::Categories),
        ("attraction", QueryField::Categories),
        ("cuisine", QueryField::Cuisines),
        ("restaurant", QueryField::Cuisines),
        ("transport", QueryField::Transportation),
        ("house type", QueryField::HouseType),
        ("room type", QueryField::HouseType),
        ("accommodation", QueryField::HouseType),
    ]
    .into_iter()
    .collect();
    let mut out: BTreeSet<QueryField> = keywords.iter().filter(|(k, _)| t.contains(*k)).map(|(_, f)| *f).collect();
    let refusal = ["will not change", "won't change", "do not change", "don't change", "keep", "not change"];
    if out.is_empty() && refusal.iter().any(|r| t.contains(r)) {
        if let Some(m) = refused {
            out.insert(m.field());
        }
    }
    out
}
