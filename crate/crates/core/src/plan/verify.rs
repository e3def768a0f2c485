//! Checks a plan against the database and query from its text alone; no
//! encoder state is consulted.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{parse_entity, parse_transport, DayRecord, GroundMode, Plan, Transport, NONE};
use crate::data::{AccommodationRecord, Database, FlightRecord, RestaurantRecord};
use crate::encoder::{EncodingParams, Meal};
use crate::query::{Destination, Query};
use crate::vocab::Transportation;
use crate::Rational;

pub const COMMONSENSE_CHECKS: [&str; 8] = [
    "within-sandbox",
    "complete",
    "activities-in-current-city",
    "reasonable-route",
    "no-repeated-restaurants",
    "no-repeated-attractions",
    "reasonable-transport-exclusivity",
    "minimum-nights",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub commonsense: Vec<CheckResult>,
    pub hard: Vec<CheckResult>,
    #[serde(with = "crate::query::amount")]
    pub total_cost: Rational,
}

impl VerificationReport {
    pub fn commonsense_passed(&self) -> usize {
        self.commonsense.iter().filter(|c| c.passed).count()
    }

    pub fn hard_passed(&self) -> usize {
        self.hard.iter().filter(|c| c.passed).count()
    }

    pub fn commonsense_ok(&self) -> bool {
        self.commonsense.iter().all(|c| c.passed)
    }

    pub fn hard_ok(&self) -> bool {
        self.hard.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.commonsense.iter().chain(&self.hard).find(|c| c.name == name)
    }

    /// Names of failed checks in report order.
    pub fn failures(&self) -> Vec<&str> {
        self.commonsense.iter().chain(&self.hard).filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }
}

fn result(name: &str, problems: Vec<String>) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        passed: problems.is_empty(),
        detail: (!problems.is_empty()).then(|| problems.join("; ")),
    }
}

/// Hard checks that apply to `q`, budget first.
pub fn hard_check_names(q: &Query) -> Vec<&'static str> {
    let lc = &q.local_constraint;
    let mut out = vec!["budget"];
    if lc.house_rule.is_some() {
        out.push("room-rule");
    }
    if lc.house_type.is_some() {
        out.push("room-type");
    }
    if lc.cuisines.is_some() {
        out.push("cuisines");
    }
    if lc.transportation.is_some() {
        out.push("transportation");
    }
    if lc.flight_rule.is_some() {
        out.push("flight-rule");
    }
    if lc.airlines.is_some() {
        out.push("airlines");
    }
    if lc.attraction_category.is_some() {
        out.push("categories");
    }
    out
}

/// Report for a query that got no plan: every check fails.
pub fn undelivered(q: &Query) -> VerificationReport {
    let fail = |name: &str| CheckResult { name: name.to_string(), passed: false, detail: Some("no plan".into()) };
    VerificationReport {
        commonsense: COMMONSENSE_CHECKS.iter().map(|n| fail(n)).collect(),
        hard: hard_check_names(q).iter().map(|n| fail(n)).collect(),
        total_cost: Rational::from_integer(0),
    }
}

fn is_none(s: &str) -> bool {
    let t = s.trim();
    t.is_empty() || t == NONE
}

/// Cities a day touches: its start and end city.
fn day_cities(day: &DayRecord) -> (String, String) {
    match super::parse_travel_city(day.current_city.trim()) {
        Some((a, b)) => (a.trim().to_string(), b.trim().to_string()),
        None => (day.current_city.trim().to_string(), day.current_city.trim().to_string()),
    }
}

fn is_travel(day: &DayRecord) -> bool {
    super::parse_travel_city(day.current_city.trim()).is_some()
}

struct Lookup<'a> {
    db: &'a Database,
}

impl<'a> Lookup<'a> {
    fn restaurant(&self, text: &str) -> Option<&'a RestaurantRecord> {
        let (name, city) = parse_entity(text)?;
        self.db.restaurants_in(city).ok()?.iter().find(|r| r.name == name)
    }

    fn attraction_exists(&self, text: &str) -> bool {
        parse_entity(text)
            .and_then(|(name, city)| self.db.attractions_in(city).ok().map(|a| a.iter().any(|r| r.name == name)))
            .unwrap_or(false)
    }

    fn accommodation(&self, text: &str) -> Option<&'a AccommodationRecord> {
        let (name, city) = parse_entity(text)?;
        self.db.accommodations_in(city).ok()?.iter().find(|r| r.name == name)
    }

    fn flight(&self, q: &Query, day: usize, t: &Transport) -> Option<&'a FlightRecord> {
        let Transport::Flight { from, to, departure, airline } = t else { return None };
        let date = *q.date.get(day)?;
        self.db
            .flight_table(from, to, date)
            .ok()?
            .iter()
            .find(|f| f.dep_time == *departure && f.airline == *airline)
    }
}

fn meals(day: &DayRecord) -> impl Iterator<Item = (Meal, &str)> {
    Meal::ALL.into_iter().map(move |m| (m, day.meal(m))).filter(|(_, s)| !is_none(s))
}

/// Independent check of `plan` for `q`.
pub fn verify(plan: &Plan, q: &Query, db: &Database, params: &EncodingParams) -> VerificationReport {
    let look = Lookup { db };
    let days = &plan.days;
    let transports: Vec<Option<Transport>> =
        days.iter().map(|d| if is_none(&d.transportation) { None } else { parse_transport(&d.transportation) }).collect();
    let people = Rational::from_integer(q.people_number as i64);

    // within-sandbox
    let mut sandbox = Vec::new();
    for (i, day) in days.iter().enumerate() {
        let (a, b) = day_cities(day);
        for c in [&a, &b] {
            if !db.has_city(c) {
                sandbox.push(format!("day {}: unknown city {c:?}", i + 1));
            }
        }
        if !is_none(&day.transportation) {
            let ok = match &transports[i] {
                None => false,
                Some(t @ Transport::Flight { .. }) => look.flight(q, i, t).is_some(),
                Some(Transport::Ground { from, to, .. }) => matches!(db.driving_lookup(from, to), Ok(Some(_))),
            };
            if !ok {
                sandbox.push(format!("day {}: unknown transportation", i + 1));
            }
        }
        for (m, text) in meals(day) {
            if look.restaurant(text).is_none() {
                sandbox.push(format!("day {}: unknown {} restaurant {text:?}", i + 1, m.name()));
            }
        }
        for a in day.attractions() {
            if !look.attraction_exists(a) {
                sandbox.push(format!("day {}: unknown attraction {a:?}", i + 1));
            }
        }
        if !is_none(&day.accommodation) && look.accommodation(&day.accommodation).is_none() {
            sandbox.push(format!("day {}: unknown accommodation", i + 1));
        }
    }

    // complete
    let mut complete = Vec::new();
    if days.len() != q.days {
        complete.push(format!("{} day records for a {}-day trip", days.len(), q.days));
    }
    for (i, day) in days.iter().enumerate() {
        if day.days != i + 1 {
            complete.push(format!("record {} is numbered {}", i + 1, day.days));
        }
        if is_none(&day.current_city) {
            complete.push(format!("day {}: no current city", i + 1));
        }
        if is_travel(day) && is_none(&day.transportation) {
            complete.push(format!("day {}: travel without transportation", i + 1));
        }
        if i + 1 < days.len() && is_none(&day.accommodation) {
            complete.push(format!("day {}: no accommodation", i + 1));
        }
    }
    if let Some(first) = days.first() {
        if is_none(&first.transportation) {
            complete.push("day 1: no outbound transportation".into());
        }
    }
    if days.len() > 1 && days.last().is_some_and(|d| is_none(&d.transportation)) {
        complete.push("last day: no return transportation".into());
    }

    // activities-in-current-city
    let mut located = Vec::new();
    for (i, day) in days.iter().enumerate() {
        let (start, end) = day_cities(day);
        let here = |text: &str| parse_entity(text).is_some_and(|(_, c)| c == start || c == end);
        for (m, text) in meals(day) {
            if !here(text) {
                located.push(format!("day {}: {} outside {}", i + 1, m.name(), day.current_city));
            }
        }
        for a in day.attractions() {
            if !here(a) {
                located.push(format!("day {}: attraction outside {}", i + 1, day.current_city));
            }
        }
        if !is_none(&day.accommodation) && !parse_entity(&day.accommodation).is_some_and(|(_, c)| c == end) {
            located.push(format!("day {}: accommodation not in {end}", i + 1));
        }
    }

    // reasonable-route
    let mut route = Vec::new();
    let mut stops: Vec<String> = Vec::new();
    let mut position = q.org.clone();
    for (i, day) in days.iter().enumerate() {
        let (start, end) = day_cities(day);
        if start != position {
            route.push(format!("day {}: starts in {start} but the traveller is in {position}", i + 1));
        }
        if is_travel(day) {
            if start == end {
                route.push(format!("day {}: travel to the same city", i + 1));
            }
            if let Some(t) = &transports[i] {
                if t.endpoints() != (start.as_str(), end.as_str()) {
                    route.push(format!("day {}: transportation does not match the route", i + 1));
                }
            }
            stops.push(end.clone());
        } else if !is_none(&day.transportation) {
            route.push(format!("day {}: transportation on a day without travel", i + 1));
        }
        position = end;
    }
    if days.first().is_some_and(|d| !is_travel(d)) {
        route.push("the trip does not depart on day 1".into());
    }
    if position != q.org || days.last().is_some_and(|d| !is_travel(d)) {
        route.push(format!("the trip does not return to {} on the last day", q.org));
    }
    let visited: Vec<&String> = stops.iter().take(stops.len().saturating_sub(1)).collect();
    let distinct: BTreeSet<&String> = visited.iter().copied().collect();
    if distinct.len() != visited.len() {
        route.push("a city is visited twice".into());
    }
    if visited.len() != q.k() {
        route.push(format!("{} cities visited, {} requested", visited.len(), q.k()));
    }
    for c in &visited {
        let allowed = match &q.dest {
            Destination::Cities(list) => list.contains(c),
            Destination::State(s) => **c != q.org && db.state_of(c) == Some(s.as_str()),
        };
        if !allowed {
            route.push(format!("{c} is not a requested destination"));
        }
    }

    // no repeats
    let mut seen = BTreeSet::new();
    let mut rest_repeat = Vec::new();
    for day in days {
        for (_, text) in meals(day) {
            if !seen.insert(text.trim()) {
                rest_repeat.push(format!("{} repeated", text.trim()));
            }
        }
    }
    let mut seen = BTreeSet::new();
    let mut attr_repeat = Vec::new();
    for day in days {
        for a in day.attractions() {
            if !seen.insert(a) {
                attr_repeat.push(format!("{a} repeated"));
            }
        }
    }

    // transport exclusivity
    let mut exclusive = Vec::new();
    let has = |pred: &dyn Fn(&Transport) -> bool| transports.iter().flatten().any(pred);
    let driving = has(&|t| matches!(t, Transport::Ground { mode: GroundMode::SelfDriving, .. }));
    if driving && has(&|t| matches!(t, Transport::Flight { .. })) {
        exclusive.push("self-driving combined with flights".into());
    }
    if driving && has(&|t| matches!(t, Transport::Ground { mode: GroundMode::Taxi, .. })) {
        exclusive.push("self-driving combined with taxis".into());
    }

    // minimum nights
    let mut nights = Vec::new();
    let mut i = 0;
    while i < days.len() {
        let acc = days[i].accommodation.trim();
        let mut j = i + 1;
        while j < days.len() && days[j].accommodation.trim() == acc {
            j += 1;
        }
        if !is_none(acc) {
            if let Some(rec) = look.accommodation(acc) {
                if ((j - i) as u32) < rec.min_nights {
                    nights.push(format!("{acc}: {} nights, at least {} required", j - i, rec.min_nights));
                }
            }
        }
        i = j;
    }

    let commonsense = vec![
        result(COMMONSENSE_CHECKS[0], sandbox),
        result(COMMONSENSE_CHECKS[1], complete),
        result(COMMONSENSE_CHECKS[2], located),
        result(COMMONSENSE_CHECKS[3], route),
        result(COMMONSENSE_CHECKS[4], rest_repeat),
        result(COMMONSENSE_CHECKS[5], attr_repeat),
        result(COMMONSENSE_CHECKS[6], exclusive),
        result(COMMONSENSE_CHECKS[7], nights),
    ];

    // cost
    let mut total = Rational::from_integer(0);
    for (i, t) in transports.iter().enumerate() {
        match t {
            Some(f @ Transport::Flight { .. }) => {
                if let Some(rec) = look.flight(q, i, f) {
                    total += rec.price * people;
                }
            }
            Some(Transport::Ground { mode, from, to }) => {
                if let Ok(Some(d)) = db.driving_lookup(from, to) {
                    total += match mode {
                        GroundMode::SelfDriving => params.self_driving_cost(&d.distance_km, q.people_number),
                        GroundMode::Taxi => params.taxi_cost(&d.distance_km, q.people_number),
                    };
                }
            }
            None => {}
        }
    }
    for day in days {
        for (_, text) in meals(day) {
            if let Some(r) = look.restaurant(text) {
                total += r.avg_cost * people;
            }
        }
        if let Some(a) = look.accommodation(&day.accommodation) {
            total += a.price * Rational::from_integer(params.rooms(q.people_number, a.max_occupancy));
        }
    }

    let lc = &q.local_constraint;
    let stays: Vec<&AccommodationRecord> = days.iter().filter_map(|d| look.accommodation(&d.accommodation)).collect();
    let flights: Vec<Option<&FlightRecord>> = transports
        .iter()
        .enumerate()
        .filter(|(_, t)| matches!(t, Some(Transport::Flight { .. })))
        .map(|(i, t)| look.flight(q, i, t.as_ref().unwrap()))
        .collect();
    let mut hard = Vec::new();
    for name in hard_check_names(q) {
        let mut problems = Vec::new();
        match name {
            "budget" => {
                if total > q.budget {
                    problems.push(format!(
                        "cost {} exceeds budget {}",
                        crate::num::format_rational(&total),
                        crate::num::format_rational(&q.budget)
                    ));
                }
            }
            "room-rule" => {
                let rule = lc.house_rule.unwrap();
                for a in &stays {
                    if a.house_rules.contains(&rule) {
                        problems.push(format!("{} has {}", a.name, rule.prohibition()));
                    }
                }
            }
            "room-type" => {
                let t = lc.house_type.unwrap();
                for a in &stays {
                    if !t.accepts(a.room_type) {
                        problems.push(format!("{} is a {}", a.name, a.room_type.as_str()));
                    }
                }
            }
            "cuisines" => {
                let served: BTreeSet<&String> = days
                    .iter()
                    .flat_map(|d| meals(d).filter_map(|(_, t)| look.restaurant(t)).collect::<Vec<_>>())
                    .flat_map(|r| r.cuisines.iter())
                    .collect();
                for c in lc.cuisines.as_ref().unwrap() {
                    if !served.contains(c) {
                        problems.push(format!("no {c} restaurant"));
                    }
                }
            }
            "transportation" => {
                let t = lc.transportation.unwrap();
                for tr in transports.iter().flatten() {
                    let bad = match (t, tr) {
                        (Transportation::NoFlight, Transport::Flight { .. }) => true,
                        (Transportation::NoSelfDriving, Transport::Ground { mode: GroundMode::SelfDriving, .. }) => {
                            true
                        }
                        (Transportation::Flight, Transport::Ground { .. }) => true,
                        _ => false,
                    };
                    if bad {
                        let (a, b) = tr.endpoints();
                        problems.push(format!("leg {a} to {b} violates {}", t.as_str()));
                    }
                }
            }
            "flight-rule" => {
                for f in &flights {
                    if !f.is_some_and(|f| f.nonstop == Some(true)) {
                        problems.push("a flight is not non-stop".into());
                    }
                }
            }
            "airlines" => {
                let allowed = lc.airlines.as_ref().unwrap();
                for f in &flights {
                    if !f.and_then(|f| f.airline.as_ref()).is_some_and(|a| allowed.contains(a)) {
                        problems.push("a flight uses another airline".into());
                    }
                }
            }
            "categories" => {
                let mut covered: BTreeMap<&str, bool> =
                    lc.attraction_category.as_ref().unwrap().iter().map(|c| (c.as_str(), false)).collect();
                for day in days {
                    for a in day.attractions() {
                        if let Some((name, city)) = parse_entity(a) {
                            if let Ok(rows) = db.attractions_in(city) {
                                for r in rows.iter().filter(|r| r.name == name) {
                                    for c in &r.categories {
                                        if let Some(v) = covered.get_mut(c.as_str()) {
                                            *v = true;
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
                for (c, ok) in covered {
                    if !ok {
                        problems.push(format!("no {c} attraction"));
                    }
                }
            }
            _ => unreachable!("unknown hard check {name}"),
        }
        hard.push(result(name, problems));
    }

    VerificationReport { commonsense, hard, total_cost: total }
}
