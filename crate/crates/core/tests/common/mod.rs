//! Shared test support: an exhaustive reference solver and seeded cases.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use chrono::{Days, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tripsolve::data::{generate_synthetic, Database, SynthParams};
use tripsolve::encoder::EncodingParams;
use tripsolve::query::{Destination, LocalConstraint, Query};
use tripsolve::vocab::{FlightRule, HouseRule, HouseType, RoomType, Transportation};
use tripsolve::Rational;

fn r(i: i64) -> Rational {
    Rational::from_integer(i)
}

fn groups(people: u32, size: u32) -> i64 {
    (people as i64 + size as i64 - 1) / size as i64
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Place {
    Home,
    Stop(usize),
}

#[derive(Clone, Debug)]
struct Move {
    cost: Rational,
    arrival: Rational,
    ground: Option<Ground>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Ground {
    SelfDrive,
    Taxi,
}

fn room_ok(want: HouseType, room: RoomType) -> bool {
    match want {
        HouseType::EntireRoom => room == RoomType::EntireHome,
        HouseType::PrivateRoom => room == RoomType::PrivateRoom,
        HouseType::SharedRoom => room == RoomType::SharedRoom,
        HouseType::NotSharedRoom => room != RoomType::SharedRoom,
    }
}

/// Exhaustive search over every itinerary of `q`, written without the
/// constraint engine. Returns the lowest total cost ignoring the budget, or
/// `None` when no itinerary exists even with unlimited money.
pub struct Oracle<'a> {
    pub q: &'a Query,
    pub db: &'a Database,
    pub p: &'a EncodingParams,
}

impl Oracle<'_> {
    pub fn feasible(&self) -> bool {
        self.min_cost().is_some_and(|c| c <= self.q.budget)
    }

    pub fn min_cost(&self) -> Option<Rational> {
        self.tuples().iter().filter_map(|t| self.tuple_min(t)).min()
    }

    fn tuples(&self) -> Vec<Vec<String>> {
        match &self.q.dest {
            Destination::Cities(list) => vec![list.clone()],
            Destination::State(s) => {
                let pool: Vec<String> = self
                    .db
                    .cities_by_state()
                    .get(s)
                    .map(|v| v.iter().filter(|c| **c != self.q.org).cloned().collect())
                    .unwrap_or_default();
                let mut out = Vec::new();
                let k = self.q.visiting_city_number;
                fn rec(pool: &[String], k: usize, cur: &mut Vec<String>, out: &mut Vec<Vec<String>>) {
                    if cur.len() == k {
                        out.push(cur.clone());
                        return;
                    }
                    for c in pool {
                        if !cur.contains(c) {
                            cur.push(c.clone());
                            rec(pool, k, cur, out);
                            cur.pop();
                        }
                    }
                }
                rec(&pool, k, &mut Vec::new(), &mut out);
                out
            }
        }
    }

    /// Strictly increasing departure days starting at 0 and ending on the
    /// last day.
    fn departure_days(&self, legs: usize) -> Vec<Vec<usize>> {
        let n = self.q.days;
        let mut out = Vec::new();
        fn rec(n: usize, legs: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == legs - 1 {
                let last = *cur.last().unwrap();
                if last < n - 1 {
                    let mut full = cur.clone();
                    full.push(n - 1);
                    out.push(full);
                }
                return;
            }
            let from = cur.last().map_or(0, |d| d + 1);
            for d in from..n - 1 {
                cur.push(d);
                rec(n, legs, cur, out);
                cur.pop();
            }
        }
        if legs > n {
            return Vec::new();
        }
        rec(n, legs, &mut vec![0], &mut out);
        out
    }

    fn moves(&self, from: &str, to: &str, day: usize) -> Vec<Move> {
        let q = self.q;
        let lc = &q.local_constraint;
        let mut out = Vec::new();
        if lc.transportation != Some(Transportation::NoFlight) {
            for f in self.db.flight_table(from, to, q.date[day]).unwrap_or(&[]) {
                if lc.flight_rule == Some(FlightRule::NonStop) && f.nonstop != Some(true) {
                    continue;
                }
                if let Some(allowed) = &lc.airlines {
                    if !f.airline.as_ref().is_some_and(|a| allowed.contains(a)) {
                        continue;
                    }
                }
                out.push(Move { cost: f.price * r(q.people_number as i64), arrival: f.arr_time, ground: None });
            }
        }
        if let Ok(Some(d)) = self.db.driving_lookup(from, to) {
            let only_fly = lc.transportation == Some(Transportation::Flight);
            if !only_fly && lc.transportation != Some(Transportation::NoSelfDriving) {
                let cost = self.p.self_driving_rate * d.distance_km * r(groups(q.people_number, self.p.self_driving_capacity));
                out.push(Move { cost, arrival: d.duration_hours, ground: Some(Ground::SelfDrive) });
            }
            if !only_fly {
                let cost = self.p.taxi_rate * d.distance_km * r(groups(q.people_number, self.p.taxi_capacity));
                out.push(Move { cost, arrival: d.duration_hours, ground: Some(Ground::Taxi) });
            }
        }
        out
    }

    fn tuple_min(&self, tuple: &[String]) -> Option<Rational> {
        let q = self.q;
        let mut stops: Vec<&str> = vec![&q.org];
        stops.extend(tuple.iter().map(String::as_str));
        stops.push(&q.org);
        let legs = tuple.len() + 1;
        let mut best: Option<Rational> = None;
        for deps in self.departure_days(legs) {
            let Some(stay) = self.lodging(tuple, &deps) else { continue };
            let options: Vec<Vec<Move>> = (0..legs).map(|i| self.moves(stops[i], stops[i + 1], deps[i])).collect();
            let mut memo: HashMap<Vec<Vec<Place>>, Option<Rational>> = HashMap::new();
            let mut pick = vec![0usize; legs];
            'combos: loop {
                if options.iter().all(|o| !o.is_empty()) {
                    let chosen: Vec<&Move> = (0..legs).map(|i| &options[i][pick[i]]).collect();
                    let drives = chosen.iter().any(|m| m.ground == Some(Ground::SelfDrive));
                    let others = chosen.iter().any(|m| m.ground != Some(Ground::SelfDrive));
                    if !(drives && others) {
                        let travel: Rational = chosen.iter().map(|m| m.cost).sum();
                        let arrivals: Vec<Option<Rational>> =
                            (0..q.days).map(|d| deps.iter().position(|x| *x == d).map(|i| chosen[i].arrival)).collect();
                        if self.sights_ok(tuple, &deps, &arrivals) {
                            let slots = self.meal_slots(&deps, &arrivals);
                            let meals = *memo.entry(slots.clone()).or_insert_with(|| self.meals_min(tuple, &slots));
                            if let Some(m) = meals {
                                let total = travel + m + stay;
                                if best.is_none_or(|b| total < b) {
                                    best = Some(total);
                                }
                            }
                        }
                    }
                } else {
                    break 'combos;
                }
                let mut i = 0;
                loop {
                    if i == legs {
                        break 'combos;
                    }
                    pick[i] += 1;
                    if pick[i] < options[i].len() {
                        break;
                    }
                    pick[i] = 0;
                    i += 1;
                }
            }
        }
        best
    }

    /// Where day `t` starts: home before the first departure and after the
    /// last, otherwise the stop reached by the latest earlier departure.
    fn place(deps: &[usize], t: usize) -> Place {
        let gone = deps.iter().filter(|d| **d < t).count();
        if gone == 0 || gone == deps.len() {
            Place::Home
        } else {
            Place::Stop(gone - 1)
        }
    }

    fn meal_slots(&self, deps: &[usize], arrivals: &[Option<Rational>]) -> Vec<Vec<Place>> {
        let p = self.p;
        let eaten: &[(Rational, Rational)] = &[
            (p.breakfast.stay_after, p.breakfast.move_before),
            (p.lunch.stay_after, p.lunch.move_before),
            (p.dinner.stay_after, p.dinner.move_before),
        ];
        let eaten = &eaten[3 - self.q.meals_per_day..];
        let mut out = Vec::new();
        for d in 0..self.q.days {
            let (cur, next) = (Self::place(deps, d), Self::place(deps, d + 1));
            for (stay, go) in eaten {
                let mut opts = vec![cur, next];
                if let Some(a) = arrivals[d] {
                    if a > *stay {
                        opts.retain(|c| *c == cur);
                    }
                    if a < *go {
                        opts.retain(|c| *c == next);
                    }
                }
                opts.dedup();
                out.push(opts);
            }
        }
        out
    }

    fn meals_min(&self, tuple: &[String], slots: &[Vec<Place>]) -> Option<Rational> {
        let rows: Vec<_> = tuple.iter().map(|c| self.db.restaurants_in(c).unwrap_or(&[])).collect();
        let want: Vec<String> = self.q.local_constraint.cuisines.iter().flatten().cloned().collect();
        let people = r(self.q.people_number as i64);
        let mut used: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); tuple.len()];
        let mut best: Option<Rational> = None;
        #[allow(clippy::too_many_arguments)]
        fn rec(
            i: usize,
            slots: &[Vec<Place>],
            rows: &[&[tripsolve::data::RestaurantRecord]],
            want: &[String],
            used: &mut Vec<BTreeSet<usize>>,
            cost: Rational,
            people: Rational,
            best: &mut Option<Rational>,
        ) {
            if i == slots.len() {
                let covered = want.iter().all(|w| {
                    used.iter().enumerate().any(|(c, set)| set.iter().any(|j| rows[c][*j].cuisines.contains(w)))
                });
                if covered && best.is_none_or(|b| cost < b) {
                    *best = Some(cost);
                }
                return;
            }
            for place in &slots[i] {
                match place {
                    Place::Home => rec(i + 1, slots, rows, want, used, cost, people, best),
                    Place::Stop(c) => {
                        for j in 0..rows[*c].len() {
                            if used[*c].insert(j) {
                                let price = rows[*c][j].avg_cost * people;
                                rec(i + 1, slots, rows, want, used, cost + price, people, best);
                                used[*c].remove(&j);
                            }
                        }
                    }
                }
            }
        }
        rec(0, slots, &rows, &want, &mut used, r(0), people, &mut best);
        best
    }

    fn sights_ok(&self, tuple: &[String], deps: &[usize], arrivals: &[Option<Rational>]) -> bool {
        let mut slots = Vec::new();
        for d in 0..self.q.days {
            let (cur, next) = (Self::place(deps, d), Self::place(deps, d + 1));
            let here = match arrivals[d] {
                Some(a) if a > self.p.attraction_stay_after => cur,
                _ => next,
            };
            for _ in 0..self.q.attractions_per_day {
                slots.push(here);
            }
        }
        let rows: Vec<_> = tuple.iter().map(|c| self.db.attractions_in(c).unwrap_or(&[])).collect();
        let want: Vec<String> = self.q.local_constraint.attraction_category.iter().flatten().cloned().collect();
        fn rec(
            i: usize,
            slots: &[Place],
            rows: &[&[tripsolve::data::AttractionRecord]],
            want: &[String],
            used: &mut Vec<BTreeSet<usize>>,
        ) -> bool {
            if i == slots.len() {
                return want.iter().all(|w| {
                    used.iter().enumerate().any(|(c, set)| set.iter().any(|j| rows[c][*j].categories.contains(w)))
                });
            }
            match slots[i] {
                Place::Home => rec(i + 1, slots, rows, want, used),
                Place::Stop(c) => (0..rows[c].len()).any(|j| {
                    if !used[c].insert(j) {
                        return false;
                    }
                    let ok = rec(i + 1, slots, rows, want, used);
                    used[c].remove(&j);
                    ok
                }),
            }
        }
        rec(0, &slots, &rows, &want, &mut vec![BTreeSet::new(); tuple.len()])
    }

    fn lodging(&self, tuple: &[String], deps: &[usize]) -> Option<Rational> {
        let lc = &self.q.local_constraint;
        let mut total = r(0);
        for (c, city) in tuple.iter().enumerate() {
            let nights = (deps[c + 1] - deps[c]) as i64;
            let cheapest = self
                .db
                .accommodations_in(city)
                .unwrap_or(&[])
                .iter()
                .filter(|a| a.min_nights as i64 <= nights)
                .filter(|a| lc.house_type.is_none_or(|t| room_ok(t, a.room_type)))
                .filter(|a| lc.house_rule.is_none_or(|h| !a.house_rules.contains(&h)))
                .map(|a| a.price * r(groups(self.q.people_number, a.max_occupancy.max(1)) * nights))
                .min()?;
            total += cheapest;
        }
        Some(total)
    }
}

/// Database shape for oracle cases: one state, at most four cities and
/// three rows per table and city.
pub fn oracle_synth(rng: &mut ChaCha8Rng) -> SynthParams {
    SynthParams {
        cities_per_state: rng.gen_range(3..=4),
        flights_per_pair: (0, 3),
        flight_route_percent: rng.gen_range(60..=100),
        driving_percent: rng.gen_range(50..=100),
        restaurants_per_city: (2, 3),
        attractions_per_city: (2, 3),
        accommodations_per_city: (1, 3),
        ..SynthParams::default()
    }
}

fn random_query(rng: &mut ChaCha8Rng, db: &Database, synth: &SynthParams) -> Query {
    let state = db.states().next().unwrap().to_string();
    let cities: Vec<String> = db.cities().map(String::from).collect();
    let days = *[3usize, 5].choose(rng).unwrap();
    let k = rng.gen_range(1..=2usize);
    let org = cities.choose(rng).unwrap().clone();
    let dest = if rng.gen_bool(0.6) {
        Destination::State(state)
    } else {
        let mut others: Vec<String> = cities.iter().filter(|c| **c != org).cloned().collect();
        others.shuffle(rng);
        Destination::Cities(others.into_iter().take(k).collect())
    };
    let start = synth.start_date + Days::new(rng.gen_range(0..=(synth.days - days) as u64));
    let mut lc = LocalConstraint::default();
    if rng.gen_bool(0.25) {
        lc.transportation = Some(*Transportation::ALL.choose(rng).unwrap());
    }
    if rng.gen_bool(0.2) {
        lc.flight_rule = Some(FlightRule::NonStop);
    }
    if rng.gen_bool(0.2) {
        let take = rng.gen_range(1..=2);
        lc.airlines = Some(synth.airlines.choose_multiple(rng, take).cloned().collect());
    }
    if rng.gen_bool(0.25) {
        lc.house_type = Some(*HouseType::ALL.choose(rng).unwrap());
    }
    if rng.gen_bool(0.25) {
        lc.house_rule = Some(*HouseRule::ALL.choose(rng).unwrap());
    }
    if rng.gen_bool(0.2) {
        lc.cuisines = Some([synth.cuisines.choose(rng).unwrap().clone()].into());
    }
    if rng.gen_bool(0.2) {
        lc.attraction_category = Some([synth.categories.choose(rng).unwrap().clone()].into());
    }
    Query {
        org,
        dest,
        visiting_city_number: k,
        days,
        date: (0..days as u64).map(|d| start + Days::new(d)).collect(),
        people_number: rng.gen_range(1..=6),
        local_constraint: lc,
        budget: r(0),
        attractions_per_day: if rng.gen_bool(0.15) { 2 } else { 1 },
        meals_per_day: *[1, 1, 2, 3].choose(rng).unwrap(),
    }
}

pub struct OracleCase {
    pub index: usize,
    pub db: Database,
    pub query: Query,
    /// Lowest itinerary cost without the budget, from the oracle.
    pub min_cost: Option<Rational>,
}

/// Case `index` of the seeded oracle family. Budgets are drawn around the
/// oracle's cheapest cost so that both verdicts occur, often right at the
/// boundary.
pub fn oracle_case(seed: u64, index: usize) -> OracleCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(7919).wrapping_add(index as u64));
    let synth = oracle_synth(&mut rng);
    let db = generate_synthetic(rng.gen(), &synth).unwrap();
    let params = EncodingParams::default();
    // Prefer queries with some itinerary so budgets matter; keep the last
    // draw either way.
    let mut query = random_query(&mut rng, &db, &synth);
    let mut min_cost = Oracle { q: &query, db: &db, p: &params }.min_cost();
    for _ in 0..3 {
        if min_cost.is_some() && rng.gen_bool(0.8) {
            break;
        }
        query = random_query(&mut rng, &db, &synth);
        min_cost = Oracle { q: &query, db: &db, p: &params }.min_cost();
    }
    query.budget = match min_cost {
        Some(m) => match rng.gen_range(0..4) {
            0 => m,
            1 => m - Rational::new(1, 100),
            2 => (m * Rational::new(rng.gen_range(101..=200), 100)).ceil(),
            _ => (m * Rational::new(rng.gen_range(40..=99), 100)).floor(),
        },
        None => r(rng.gen_range(200..=20_000)),
    };
    if query.budget < r(0) {
        query.budget = r(0);
    }
    OracleCase { index, db, query, min_cost }
}

pub fn date(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).unwrap()
}

/// Two cities in one state: `Home` and `Away`. One outbound flight on the
/// first day lands at `arrive`; the return flight on the last day lands at
/// 1:00, so no meal of that day is eaten away.
pub fn breakfast_fixture(arrive: i64) -> (Database, Query) {
    use tripsolve::data::{AccommodationRecord, AttractionRecord, FlightRecord, RestaurantRecord, Tables};
    let day0 = date(2024, 3, 1);
    let day2 = date(2024, 3, 3);
    let flight = |from: &str, to: &str, on, dep: i64, arr: i64| FlightRecord {
        origin: from.into(),
        destination: to.into(),
        date: on,
        price: r(100),
        dep_time: r(dep),
        arr_time: r(arr),
        airline: Some("United".into()),
        nonstop: Some(true),
    };
    let tables = Tables {
        cities: vec![("Plains".into(), "Home".into()), ("Plains".into(), "Away".into())],
        flights: vec![flight("Home", "Away", day0, 0, arrive), flight("Away", "Home", day2, 0, 1)],
        driving: Vec::new(),
        restaurants: (0..6)
            .map(|i| RestaurantRecord {
                city: "Away".into(),
                name: format!("Diner {i}"),
                avg_cost: r(10 + i),
                cuisines: ["American".to_string()].into(),
            })
            .collect(),
        attractions: (0..3)
            .map(|i| AttractionRecord {
                city: "Away".into(),
                name: format!("Sight {i}"),
                categories: ["Park".to_string()].into(),
            })
            .collect(),
        accommodations: vec![AccommodationRecord {
            city: "Away".into(),
            name: "Inn".into(),
            price: r(50),
            room_type: RoomType::PrivateRoom,
            house_rules: BTreeSet::new(),
            min_nights: 1,
            max_occupancy: 2,
        }],
    };
    let q = Query {
        org: "Home".into(),
        dest: Destination::Cities(vec!["Away".into()]),
        visiting_city_number: 1,
        days: 3,
        date: vec![day0, date(2024, 3, 2), day2],
        people_number: 1,
        local_constraint: LocalConstraint::default(),
        budget: r(10_000),
        attractions_per_day: 1,
        meals_per_day: 3,
    };
    (Database::new(tables).unwrap(), q)
}
