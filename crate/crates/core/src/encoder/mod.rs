//! Compiles a query and one ordered tuple of destination cities into a
//! constraint program, and runs the outer loop over tuples.

mod build;
pub mod labels;
mod solve;

use std::collections::BTreeSet;

use crate::data::{DataError, Database};
use crate::query::{Destination, Query};
use crate::Rational;

pub use build::{encode, AttractionSlot, Encoding, Leg, MealSlot, ScheduleTerms};
pub use solve::{
    cheapest_cost, solve_query, Delivered, Infeasible, PlanError, PlanOutcome, SolveLimits, TimedOut, TupleCore,
};

/// Meal slots in day order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Meal {
    Breakfast,
    Lunch,
    Dinner,
}

impl Meal {
    pub const ALL: [Meal; 3] = [Meal::Breakfast, Meal::Lunch, Meal::Dinner];

    pub fn letter(self) -> char {
        match self {
            Meal::Breakfast => 'b',
            Meal::Lunch => 'l',
            Meal::Dinner => 'd',
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Meal::Breakfast => "breakfast",
            Meal::Lunch => "lunch",
            Meal::Dinner => "dinner",
        }
    }

    /// Meals eaten per day for `meals_per_day` in 1..=3: the latest ones.
    pub fn schedule(meals_per_day: usize) -> &'static [Meal] {
        &Meal::ALL[3 - meals_per_day.clamp(1, 3)..]
    }
}

/// Arrival-hour window for a meal: arriving after `stay_after` means the
/// meal is still eaten where the day started, arriving before
/// `move_before` means it is eaten at the destination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MealWindow {
    pub stay_after: Rational,
    pub move_before: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodingParams {
    pub breakfast: MealWindow,
    pub lunch: MealWindow,
    pub dinner: MealWindow,
    /// Attraction is visited where the day started iff arrival is later.
    pub attraction_stay_after: Rational,
    pub self_driving_rate: Rational,
    pub self_driving_capacity: u32,
    pub taxi_rate: Rational,
    pub taxi_capacity: u32,
    pub no_transport_penalty: Rational,
    pub origin_sentinel: i64,
    pub no_arrival: Rational,
}

impl Default for EncodingParams {
    fn default() -> Self {
        let w = |a, b| MealWindow { stay_after: Rational::from_integer(a), move_before: Rational::from_integer(b) };
        EncodingParams {
            breakfast: w(10, 5),
            lunch: w(15, 10),
            dinner: w(22, 17),
            attraction_stay_after: Rational::from_integer(18),
            self_driving_rate: Rational::new(1, 20),
            self_driving_capacity: 5,
            taxi_rate: Rational::from_integer(1),
            taxi_capacity: 4,
            no_transport_penalty: Rational::from_integer(10000),
            origin_sentinel: -1,
            no_arrival: Rational::from_integer(25),
        }
    }
}

impl EncodingParams {
    pub fn window(&self, meal: Meal) -> &MealWindow {
        match meal {
            Meal::Breakfast => &self.breakfast,
            Meal::Lunch => &self.lunch,
            Meal::Dinner => &self.dinner,
        }
    }

    pub fn self_driving_cost(&self, distance_km: &Rational, people: u32) -> Rational {
        self.self_driving_rate
            * distance_km
            * Rational::from_integer(crate::num::ceil_div(people as i64, self.self_driving_capacity as i64))
    }

    pub fn taxi_cost(&self, distance_km: &Rational, people: u32) -> Rational {
        self.taxi_rate * distance_km * Rational::from_integer(crate::num::ceil_div(people as i64, self.taxi_capacity as i64))
    }

    pub fn rooms(&self, people: u32, max_occupancy: u32) -> i64 {
        crate::num::ceil_div(people as i64, max_occupancy.max(1) as i64)
    }

    pub fn check(&self) -> Result<(), String> {
        if self.self_driving_capacity == 0 || self.taxi_capacity == 0 {
            return Err("capacities must be at least 1".into());
        }
        let hours = |r: &Rational| *r >= Rational::from_integer(0) && *r <= Rational::from_integer(24);
        for m in Meal::ALL {
            let w = self.window(m);
            if !hours(&w.stay_after) || !hours(&w.move_before) {
                return Err(format!("{} thresholds must be within [0, 24]", m.name()));
            }
        }
        if !hours(&self.attraction_stay_after) {
            return Err("attraction threshold must be within [0, 24]".into());
        }
        if self.origin_sentinel >= 0 {
            return Err("origin sentinel must be negative".into());
        }
        Ok(())
    }
}

/// Destination candidates in table order: the explicit list, or the state's
/// cities without the origin.
pub fn candidates(db: &Database, q: &Query) -> Result<Vec<String>, DataError> {
    match &q.dest {
        Destination::Cities(list) => {
            for c in list {
                if !db.has_city(c) {
                    return Err(DataError::UnknownCity(c.clone()));
                }
            }
            Ok(list.clone())
        }
        Destination::State(state) => db.city_search(state, &q.org),
    }
}

fn reachable(db: &Database, q: &Query, from: &str, to: &str) -> bool {
    if matches!(db.driving_lookup(from, to), Ok(Some(_))) {
        return true;
    }
    q.date.iter().any(|d| db.flight_table(from, to, *d).map(|t| !t.is_empty()).unwrap_or(false))
}

/// Ordered tuples of distinct candidates. Tuples whose every leg has some
/// flight on a trip date or a road route come first; both groups keep
/// lexicographic candidate order.
pub fn enumerate_city_tuples(db: &Database, q: &Query) -> Result<Vec<Vec<String>>, DataError> {
    if !db.has_city(&q.org) {
        return Err(DataError::UnknownCity(q.org.clone()));
    }
    let cands = candidates(db, q)?;
    if let Destination::Cities(list) = &q.dest {
        return Ok(vec![list.clone()]);
    }
    let k = q.k();
    let mut all = Vec::new();
    let mut current = Vec::with_capacity(k);
    let mut used = BTreeSet::new();
    permute(&cands, k, &mut current, &mut used, &mut all);
    let (mut good, bad): (Vec<_>, Vec<_>) = all.into_iter().partition(|t: &Vec<String>| {
        let mut stops = vec![q.org.as_str()];
        stops.extend(t.iter().map(String::as_str));
        stops.push(q.org.as_str());
        stops.windows(2).all(|w| reachable(db, q, w[0], w[1]))
    });
    good.extend(bad);
    Ok(good)
}

fn permute(
    cands: &[String],
    k: usize,
    current: &mut Vec<String>,
    used: &mut BTreeSet<usize>,
    out: &mut Vec<Vec<String>>,
) {
    if current.len() == k {
        out.push(current.clone());
        return;
    }
    for (i, c) in cands.iter().enumerate() {
        if used.insert(i) {
            current.push(c.clone());
            permute(cands, k, current, used, out);
            current.pop();
            used.remove(&i);
        }
    }
}
