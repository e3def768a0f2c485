use tripsolve_engine::{Formula, Program, Term, VarId};

use super::labels;
use super::{EncodingParams, Meal};
use crate::data::{
    AccommodationRecord, AttractionRecord, DataError, Database, DrivingRecord, FlightRecord, RestaurantRecord,
};
use crate::query::Query;
use crate::vocab::Transportation;
use crate::Rational;

/// One transportation leg and the rows it can use.
#[derive(Debug, Clone)]
pub struct Leg {
    pub from: String,
    pub to: String,
    /// Flights per trip day.
    pub flights: Vec<Vec<FlightRecord>>,
    /// Row width of the flattened flight tables, at least 1.
    pub width: usize,
    pub driving: Option<DrivingRecord>,
}

#[derive(Debug, Clone)]
pub struct MealSlot {
    pub day: usize,
    pub meal: Meal,
    pub city: VarId,
    pub index: VarId,
    pub cost: Formula,
}

#[derive(Debug, Clone)]
pub struct AttractionSlot {
    pub day: usize,
    pub ordinal: usize,
    pub city: VarId,
    pub index: VarId,
}

/// Handles to every variable family and derived term of one encoding.
#[derive(Debug, Clone)]
pub struct ScheduleTerms {
    pub city_vars: Vec<VarId>,
    pub departure_dates: Vec<VarId>,
    pub flight: Vec<VarId>,
    pub self_driving: Vec<VarId>,
    pub taxi: Vec<VarId>,
    pub flight_index: Vec<VarId>,
    pub leg_arrivals: Vec<Formula>,
    /// Arrival hour per day, `no_arrival` on days without a departure.
    pub arrivals: Vec<Formula>,
    /// `city_timeline[d]` is where day `d` starts, `city_timeline[d + 1]`
    /// where it ends; the origin is the sentinel.
    pub city_timeline: Vec<Formula>,
    pub meals: Vec<MealSlot>,
    pub attractions: Vec<AttractionSlot>,
    pub accommodation_index: Vec<VarId>,
    pub cuisine_counters: Vec<(String, VarId)>,
    pub category_counters: Vec<(String, VarId)>,
    pub leg_costs: Vec<Formula>,
    pub accommodation_costs: Vec<Formula>,
    pub spent: Formula,
    pub budget_limit: Rational,
}

/// A compiled tuple: the program plus everything needed to read a model.
#[derive(Debug, Clone)]
pub struct Encoding {
    pub program: Program,
    pub tuple: Vec<String>,
    pub candidates: Vec<String>,
    pub terms: ScheduleTerms,
    pub legs: Vec<Leg>,
    pub restaurants: Vec<Vec<RestaurantRecord>>,
    pub attractions: Vec<Vec<AttractionRecord>>,
    pub accommodations: Vec<Vec<AccommodationRecord>>,
    pub people: u32,
    pub days: usize,
}

fn v(id: VarId) -> Formula {
    Term::var(id)
}

fn int(i: i64) -> Formula {
    Term::int(i)
}

fn num(r: Rational) -> Formula {
    Term::constant(r)
}

fn int_table(values: impl IntoIterator<Item = i64>) -> Vec<Rational> {
    values.into_iter().map(Rational::from_integer).collect()
}

fn flag(b: bool) -> Rational {
    Rational::from_integer(b as i64)
}

/// Pads per-city rows to a common width and flattens them, so that
/// `city * width + index` addresses row `index` of city `city`.
fn flatten<T>(per_city: &[Vec<T>], width: usize, pad: Rational, f: impl Fn(&T) -> Rational) -> Vec<Rational> {
    let mut out = Vec::with_capacity(per_city.len().max(1) * width);
    for rows in per_city {
        for j in 0..width {
            out.push(rows.get(j).map(&f).unwrap_or(pad));
        }
    }
    if out.is_empty() {
        out.push(pad);
    }
    out
}

fn slug(tag: &str) -> String {
    tag.replace(' ', "_")
}

/// Compiles `q` restricted to the ordered destination `tuple`.
pub fn encode(q: &Query, db: &Database, tuple: &[String], params: &EncodingParams) -> Result<Encoding, DataError> {
    let n = q.days;
    let k = tuple.len();
    let people = q.people_number;
    let people_r = Rational::from_integer(people as i64);
    let sentinel = params.origin_sentinel;
    let lc = &q.local_constraint;
    let candidates = super::candidates(db, q)?;
    let mut p = Program::new();

    // cities
    let mut city_vars = Vec::with_capacity(k);
    for (i, city) in tuple.iter().enumerate() {
        let pos = candidates.iter().position(|c| c == city).ok_or_else(|| DataError::UnknownCity(city.clone()))?;
        let var = p.int_var(format!("city_{i}"), 0, candidates.len() as i64 - 1);
        p.assert(labels::CITY, v(var).equals(int(pos as i64)));
        city_vars.push(var);
    }

    // departure dates
    let deps: Vec<VarId> = (0..=k).map(|i| p.int_var(format!("departure_date_{i}"), 0, n as i64 - 1)).collect();
    p.assert(labels::START_DATE, v(deps[0]).equals(int(0)));
    p.assert(labels::END_DATE, v(deps[k]).equals(int(n as i64 - 1)));
    for i in 1..=k {
        p.assert(labels::VALID_DATE, v(deps[i - 1]).less_than(v(deps[i])));
    }

    // methods
    let legs_n = k + 1;
    let flight: Vec<VarId> = (0..legs_n).map(|i| p.bool_var(format!("flight_{i}"))).collect();
    let drive: Vec<VarId> = (0..legs_n).map(|i| p.bool_var(format!("self_driving_{i}"))).collect();
    let taxi: Vec<VarId> = (0..legs_n).map(|i| p.bool_var(format!("taxi_{i}"))).collect();
    for i in 0..legs_n {
        let (f, d, t) = (v(flight[i]), v(drive[i]), v(taxi[i]));
        p.assert(
            labels::one_method(i),
            Term::all([
                Term::any([f.clone(), d.clone(), t.clone()]),
                f.clone().and(d.clone()).not(),
                f.clone().and(t.clone()).not(),
                d.and(t).not(),
            ]),
        );
    }
    let no_drive = Term::all(drive.iter().map(|d| v(*d).not()));
    p.assert(labels::NO_DRIVE_IF_FLIGHT, Term::any(flight.iter().map(|f| v(*f))).implies(no_drive.clone()));
    p.assert(labels::NO_DRIVE_IF_TAXI, Term::any(taxi.iter().map(|t| v(*t))).implies(no_drive));
    match lc.transportation {
        Some(Transportation::NoFlight) => {
            for i in 0..legs_n {
                p.assert(labels::no_flight(i), v(flight[i]).not());
            }
        }
        Some(Transportation::NoSelfDriving) => {
            for i in 0..legs_n {
                p.assert(labels::no_self_driving(i), v(drive[i]).not());
            }
        }
        Some(Transportation::Flight) => {
            for i in 0..legs_n {
                p.assert(labels::no_self_driving(i), v(drive[i]).not());
                p.assert(labels::no_taxi(i), v(taxi[i]).not());
            }
        }
        None => {}
    }

    // legs: flights and driving
    let mut stops: Vec<&str> = vec![q.org.as_str()];
    stops.extend(tuple.iter().map(String::as_str));
    stops.push(q.org.as_str());
    let mut legs = Vec::with_capacity(legs_n);
    let mut flight_index = Vec::with_capacity(legs_n);
    let mut leg_costs = Vec::with_capacity(legs_n);
    let mut leg_arrivals = Vec::with_capacity(legs_n);
    for i in 0..legs_n {
        let (from, to) = (stops[i], stops[i + 1]);
        let mut per_day = Vec::with_capacity(n);
        for d in &q.date {
            per_day.push(db.flight_table(from, to, *d)?.to_vec());
        }
        let width = per_day.iter().map(Vec::len).max().unwrap_or(0).max(1);
        let driving = db.driving_lookup(from, to)?.cloned();
        let idx = p.int_var(format!("flight_index_{i}"), -1, width as i64 - 1);
        flight_index.push(idx);

        let lens = int_table(per_day.iter().map(|r| r.len() as i64));
        let row = v(deps[i]).times(Rational::from_integer(width as i64)).plus(v(idx));
        let f = v(flight[i]);
        p.assert(
            labels::valid_flight(i),
            Term::all([
                f.clone().implies(v(idx).at_least(int(0)).and(v(idx).less_than(Term::element(lens, v(deps[i]))))),
                f.clone().not().implies(v(idx).equals(int(-1))),
            ]),
        );
        let prices = flatten(&per_day, width, Rational::from_integer(0), |r| r.price);
        let arrs = flatten(&per_day, width, params.no_arrival, |r| r.arr_time);
        if lc.flight_rule.is_some() {
            let ok = flatten(&per_day, width, flag(false), |r| flag(r.nonstop == Some(true)));
            p.assert(labels::non_stop(i), f.clone().implies(Term::element(ok, row.clone()).equals(int(1))));
        }
        if let Some(allowed) = &lc.airlines {
            let ok = flatten(&per_day, width, flag(false), |r| {
                flag(r.airline.as_ref().is_some_and(|a| allowed.contains(a)))
            });
            p.assert(labels::airline(i), f.clone().implies(Term::element(ok, row.clone()).equals(int(1))));
        }
        p.assert(
            labels::driving_possible(i),
            v(drive[i]).or(v(taxi[i])).implies(Term::Bool(driving.is_some())),
        );
        let (self_cost, taxi_cost, drive_arrival) = match &driving {
            Some(rec) => (
                params.self_driving_cost(&rec.distance_km, people),
                params.taxi_cost(&rec.distance_km, people),
                rec.duration_hours,
            ),
            None => (params.no_transport_penalty, params.no_transport_penalty, params.no_arrival),
        };
        leg_costs.push(Term::ite(
            f.clone(),
            Term::element(prices, row.clone()).times(people_r),
            Term::ite(
                v(drive[i]),
                num(self_cost),
                Term::ite(v(taxi[i]), num(taxi_cost), num(params.no_transport_penalty)),
            ),
        ));
        leg_arrivals.push(Term::ite(f, Term::element(arrs, row), num(drive_arrival)));
        legs.push(Leg { from: from.to_string(), to: to.to_string(), flights: per_day, width, driving });
    }

    // timeline and arrivals
    let mut city_timeline = Vec::with_capacity(n + 1);
    city_timeline.push(int(sentinel));
    for t in 1..=n {
        let t_i = int(t as i64);
        let mut term = int(0);
        for c in 1..k {
            term = Term::ite(v(deps[c]).less_than(t_i.clone()), int(c as i64), term);
        }
        term = Term::ite(v(deps[k]).less_than(t_i), int(sentinel), term);
        city_timeline.push(term);
    }
    let mut arrivals = Vec::with_capacity(n);
    for d in 0..n {
        let mut term = num(params.no_arrival);
        for i in (0..legs_n).rev() {
            term = Term::ite(v(deps[i]).equals(int(d as i64)), leg_arrivals[i].clone(), term);
        }
        arrivals.push(term);
    }

    // restaurants
    let restaurants: Vec<Vec<RestaurantRecord>> =
        tuple.iter().map(|c| db.restaurants_in(c).map(<[_]>::to_vec)).collect::<Result<_, _>>()?;
    let r_width = restaurants.iter().map(Vec::len).max().unwrap_or(0).max(1);
    let r_lens = int_table(std::iter::once(0).chain(restaurants.iter().map(|r| r.len() as i64)));
    let r_prices = flatten(&restaurants, r_width, Rational::from_integer(0), |r| r.avg_cost);
    let mut meals = Vec::new();
    for d in 0..n {
        for &meal in Meal::schedule(q.meals_per_day) {
            let s = meals.len();
            let city = p.int_var(format!("restaurant_city_{s}"), sentinel, k as i64 - 1);
            let index = p.int_var(format!("restaurant_index_{s}"), -1, r_width as i64 - 1);
            let label = labels::meal_city(meal.letter());
            let (cur, next) = (city_timeline[d].clone(), city_timeline[d + 1].clone());
            let w = params.window(meal);
            p.assert(label.clone(), v(city).equals(cur.clone()).or(v(city).equals(next.clone())));
            p.assert(label.clone(), arrivals[d].clone().greater_than(num(w.stay_after)).implies(v(city).equals(cur)));
            p.assert(label, arrivals[d].clone().less_than(num(w.move_before)).implies(v(city).equals(next)));
            let present = v(city).differs(int(sentinel));
            p.assert(
                labels::VALID_RESTAURANT,
                present.clone().implies(
                    v(index)
                        .at_least(int(0))
                        .and(v(index).less_than(Term::element(r_lens.clone(), v(city).plus(int(1))))),
                ),
            );
            p.assert(labels::VALID_RESTAURANT, present.clone().not().implies(v(index).equals(int(-1))));
            let row = v(city).times(Rational::from_integer(r_width as i64)).plus(v(index));
            let cost = Term::ite(present, Term::element(r_prices.clone(), row).times(people_r), int(0));
            meals.push(MealSlot { day: d, meal, city, index, cost });
        }
    }
    for i in 0..meals.len() {
        for j in (0..i).rev() {
            let (a, b) = (&meals[i], &meals[j]);
            p.assert(
                labels::NON_REPEATING_RESTAURANT,
                v(a.city).differs(int(sentinel)).and(v(a.city).equals(v(b.city))).implies(v(a.index).differs(v(b.index))),
            );
        }
    }
    let mut cuisine_counters = Vec::new();
    if let Some(cuisines) = &lc.cuisines {
        for tag in cuisines {
            let has = flatten(&restaurants, r_width, flag(false), |r| flag(r.cuisines.contains(tag)));
            let count = Term::sum(meals.iter().map(|m| {
                let row = v(m.city).times(Rational::from_integer(r_width as i64)).plus(v(m.index));
                Term::ite(v(m.city).differs(int(sentinel)), Term::element(has.clone(), row), int(0))
            }));
            let counter = p.int_var(format!("cuisine_{}", slug(tag)), 0, meals.len() as i64);
            let label = labels::cuisine(tag);
            p.assert(label.clone(), v(counter).equals(count));
            p.assert(label, v(counter).greater_than(int(0)));
            cuisine_counters.push((tag.clone(), counter));
        }
    }

    // attractions
    let attractions: Vec<Vec<AttractionRecord>> =
        tuple.iter().map(|c| db.attractions_in(c).map(<[_]>::to_vec)).collect::<Result<_, _>>()?;
    let a_width = attractions.iter().map(Vec::len).max().unwrap_or(0).max(1);
    let a_lens = int_table(std::iter::once(0).chain(attractions.iter().map(|a| a.len() as i64)));
    let mut attraction_slots = Vec::new();
    for d in 0..n {
        for ordinal in 0..q.attractions_per_day {
            let s = attraction_slots.len();
            let city = p.int_var(format!("attraction_city_{s}"), sentinel, k as i64 - 1);
            let index = p.int_var(format!("attraction_index_{s}"), -1, a_width as i64 - 1);
            p.assert(
                labels::ATTRACTION_CITY,
                v(city).equals(Term::ite(
                    arrivals[d].clone().greater_than(num(params.attraction_stay_after)),
                    city_timeline[d].clone(),
                    city_timeline[d + 1].clone(),
                )),
            );
            let present = v(city).differs(int(sentinel));
            p.assert(
                labels::VALID_ATTRACTION,
                present.clone().implies(
                    v(index)
                        .at_least(int(0))
                        .and(v(index).less_than(Term::element(a_lens.clone(), v(city).plus(int(1))))),
                ),
            );
            p.assert(labels::VALID_ATTRACTION, present.not().implies(v(index).equals(int(-1))));
            attraction_slots.push(AttractionSlot { day: d, ordinal, city, index });
        }
    }
    for i in 0..attraction_slots.len() {
        for j in (0..i).rev() {
            let (a, b) = (&attraction_slots[i], &attraction_slots[j]);
            p.assert(
                labels::NON_REPEATING_ATTRACTION,
                v(a.city).differs(int(sentinel)).and(v(a.city).equals(v(b.city))).implies(v(a.index).differs(v(b.index))),
            );
        }
    }
    let mut category_counters = Vec::new();
    if let Some(categories) = &lc.attraction_category {
        for tag in categories {
            let has = flatten(&attractions, a_width, flag(false), |a| flag(a.categories.contains(tag)));
            let count = Term::sum(attraction_slots.iter().map(|a| {
                let row = v(a.city).times(Rational::from_integer(a_width as i64)).plus(v(a.index));
                Term::ite(v(a.city).differs(int(sentinel)), Term::element(has.clone(), row), int(0))
            }));
            let counter = p.int_var(format!("category_{}", slug(tag)), 0, attraction_slots.len() as i64);
            let label = labels::category(tag);
            p.assert(label.clone(), v(counter).equals(count));
            p.assert(label, v(counter).greater_than(int(0)));
            category_counters.push((tag.clone(), counter));
        }
    }

    // accommodations
    let accommodations: Vec<Vec<AccommodationRecord>> =
        tuple.iter().map(|c| db.accommodations_in(c).map(<[_]>::to_vec)).collect::<Result<_, _>>()?;
    let max_nights = (n as i64 - 1).max(1);
    let mut accommodation_index = Vec::with_capacity(k);
    let mut accommodation_costs = Vec::with_capacity(k);
    for (c, rows) in accommodations.iter().enumerate() {
        let idx = p.int_var(format!("accommodation_index_{c}"), 0, rows.len().max(1) as i64 - 1);
        p.assert(
            labels::VALID_ACCOMMODATION,
            v(idx).at_least(int(0)).and(v(idx).less_than(int(rows.len() as i64))),
        );
        let nights = v(deps[c + 1]).minus(v(deps[c]));
        let per_night: Vec<Rational> = if rows.is_empty() {
            vec![Rational::from_integer(0)]
        } else {
            rows.iter()
                .map(|a| a.price * Rational::from_integer(params.rooms(people, a.max_occupancy)))
                .collect()
        };
        let table = |m: i64| -> Vec<Rational> { per_night.iter().map(|x| x * Rational::from_integer(m)).collect() };
        let mut cost = Term::element(table(max_nights), v(idx));
        for m in (1..max_nights).rev() {
            cost = Term::ite(nights.clone().equals(int(m)), Term::element(table(m), v(idx)), cost);
        }
        let min_nights = if rows.is_empty() {
            vec![Rational::from_integer(1)]
        } else {
            int_table(rows.iter().map(|a| a.min_nights as i64))
        };
        p.assert(labels::MINIMUM_NIGHTS, Term::element(min_nights, v(idx)).at_most(nights));
        if let Some(t) = lc.house_type {
            let ok: Vec<Rational> = if rows.is_empty() {
                vec![flag(false)]
            } else {
                rows.iter().map(|a| flag(t.accepts(a.room_type))).collect()
            };
            p.assert(labels::room_type(t), Term::element(ok, v(idx)).equals(int(1)));
        }
        if let Some(rule) = lc.house_rule {
            let ok: Vec<Rational> = if rows.is_empty() {
                vec![flag(false)]
            } else {
                rows.iter().map(|a| flag(!a.house_rules.contains(&rule))).collect()
            };
            p.assert(labels::house_rule(rule), Term::element(ok, v(idx)).equals(int(1)));
        }
        accommodation_index.push(idx);
        accommodation_costs.push(cost);
    }

    // budget
    let spent = Term::sum(
        leg_costs
            .iter()
            .cloned()
            .chain(meals.iter().map(|m| m.cost.clone()))
            .chain(accommodation_costs.iter().cloned()),
    );
    p.assert(labels::BUDGET, spent.clone().at_most(num(q.budget)));

    let terms = ScheduleTerms {
        city_vars,
        departure_dates: deps,
        flight,
        self_driving: drive,
        taxi,
        flight_index,
        leg_arrivals,
        arrivals,
        city_timeline,
        meals,
        attractions: attraction_slots,
        accommodation_index,
        cuisine_counters,
        category_counters,
        leg_costs,
        accommodation_costs,
        spent,
        budget_limit: q.budget,
    };
    Ok(Encoding {
        program: p,
        tuple: tuple.to_vec(),
        candidates,
        terms,
        legs,
        restaurants,
        attractions,
        accommodations,
        people,
        days: n,
    })
}
