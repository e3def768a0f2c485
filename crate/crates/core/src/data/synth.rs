use std::collections::BTreeSet;

use chrono::{Days, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    AccommodationRecord, AttractionRecord, DataError, Database, DrivingRecord, FlightRecord, RestaurantRecord, Tables,
};
use crate::vocab::{HouseRule, RoomType, CATEGORIES, CUISINES};
use crate::Rational;

/// Knobs for [`generate_synthetic`]. Ranges are inclusive `(lo, hi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    pub states: usize,
    pub cities_per_state: usize,
    pub start_date: NaiveDate,
    /// Length of the date window that has flights.
    pub days: usize,
    /// Flights per ordered city pair and date.
    pub flights_per_pair: (usize, usize),
    /// Percent chance that a city pair has any flights at all.
    pub flight_route_percent: u32,
    /// Percent chance that an ordered city pair has a road route.
    pub driving_percent: u32,
    pub restaurants_per_city: (usize, usize),
    pub attractions_per_city: (usize, usize),
    pub accommodations_per_city: (usize, usize),
    pub flight_price: (i64, i64),
    pub restaurant_cost: (i64, i64),
    pub room_price: (i64, i64),
    pub distance_km: (i64, i64),
    pub airlines: Vec<String>,
    /// Percent of flights that are non-stop.
    pub nonstop_percent: u32,
    /// Attraction categories drawn from this list.
    pub categories: Vec<String>,
    /// Cuisine tags drawn from this list.
    pub cuisines: Vec<String>,
    /// Percent of listings carrying each "No X" rule.
    pub house_rule_percent: u32,
    pub max_min_nights: u32,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            states: 1,
            cities_per_state: 4,
            start_date: NaiveDate::from_ymd_opt(2024, 3, 1).expect("valid date"),
            days: 7,
            flights_per_pair: (0, 2),
            flight_route_percent: 70,
            driving_percent: 60,
            restaurants_per_city: (1, 3),
            attractions_per_city: (1, 3),
            accommodations_per_city: (1, 3),
            flight_price: (40, 400),
            restaurant_cost: (8, 60),
            room_price: (40, 300),
            distance_km: (80, 1200),
            airlines: ["United", "Delta", "Emirates", "JetBlue"].map(String::from).to_vec(),
            nonstop_percent: 60,
            categories: CATEGORIES[..6].iter().map(|s| s.to_string()).collect(),
            cuisines: CUISINES.iter().map(|s| s.to_string()).collect(),
            house_rule_percent: 25,
            max_min_nights: 2,
        }
    }
}

impl SynthParams {
    /// Forbids non-stop flights entirely.
    pub fn forbid_nonstop(mut self) -> Self {
        self.nonstop_percent = 0;
        self
    }

    fn check(&self) -> Result<(), DataError> {
        let bad = |m: &str| Err(DataError::BadParams(m.into()));
        if self.states == 0 || self.cities_per_state == 0 {
            return bad("need at least one state and one city per state");
        }
        if self.states * self.cities_per_state > PREFIXES.len() * SUFFIXES.len() {
            return bad("too many cities for the name generator");
        }
        if self.days == 0 {
            return bad("date window must be positive");
        }
        for (name, (lo, hi)) in [
            ("flights_per_pair", self.flights_per_pair),
            ("restaurants_per_city", self.restaurants_per_city),
            ("attractions_per_city", self.attractions_per_city),
            ("accommodations_per_city", self.accommodations_per_city),
        ] {
            if lo > hi {
                return Err(DataError::BadParams(format!("{name}: empty range")));
            }
            if hi > NOUNS.len() {
                return Err(DataError::BadParams(format!("{name}: at most {} rows per city", NOUNS.len())));
            }
        }
        for (name, (lo, hi)) in [
            ("flight_price", self.flight_price),
            ("restaurant_cost", self.restaurant_cost),
            ("room_price", self.room_price),
            ("distance_km", self.distance_km),
        ] {
            if lo > hi || lo < 0 {
                return Err(DataError::BadParams(format!("{name}: empty or negative range")));
            }
        }
        if self.distance_km.0 == 0 {
            return bad("distance_km must be positive");
        }
        if self.flights_per_pair.1 > 0 && self.airlines.is_empty() {
            return bad("flights requested but no airlines given");
        }
        if self.restaurants_per_city.1 > 0 && self.cuisines.is_empty() {
            return bad("restaurants requested but no cuisines given");
        }
        if [self.flight_route_percent, self.driving_percent, self.nonstop_percent, self.house_rule_percent]
            .iter()
            .any(|p| *p > 100)
        {
            return bad("percentages must be within 0..=100");
        }
        if self.max_min_nights == 0 {
            return bad("max_min_nights must be positive");
        }
        Ok(())
    }
}

const STATES: [&str; 8] = ["Alder", "Brookvale", "Corrin", "Dunmore", "Eastmarch", "Fenwick", "Greywater", "Highmoor"];
const PREFIXES: [&str; 16] = [
    "Ash", "Bel", "Cor", "Dun", "Elm", "Fair", "Glen", "Hal", "Iron", "Jun", "Kings", "Lake", "Mill", "Oak", "Pine",
    "Stone",
];
const SUFFIXES: [&str; 6] = ["ford", "ton", "wood", "field", "port", "dale"];
const ADJECTIVES: [&str; 6] = ["Copper", "Golden", "Quiet", "Blue", "Old", "Lucky"];
const NOUNS: [&str; 6] = ["Spoon", "Garden", "Lantern", "Harbor", "Table", "Kettle"];
const SIGHTS: [&str; 6] = ["Gardens", "Hall", "Point", "Square", "Gallery", "Grounds"];
const LODGES: [&str; 6] = ["Loft", "Suite", "Cottage", "Studio", "House", "Flat"];

fn city_name(i: usize) -> String {
    format!("{}{}", PREFIXES[i % PREFIXES.len()], SUFFIXES[i / PREFIXES.len()])
}

fn pick_count(rng: &mut ChaCha8Rng, (lo, hi): (usize, usize)) -> usize {
    rng.gen_range(lo..=hi)
}

fn quarter_hour(rng: &mut ChaCha8Rng, lo_hour: i64, hi_hour: i64) -> Rational {
    Rational::new(rng.gen_range(lo_hour * 4..=hi_hour * 4), 4)
}

fn subset(rng: &mut ChaCha8Rng, pool: &[String], max: usize) -> BTreeSet<String> {
    let n = rng.gen_range(1..=max.min(pool.len()).max(1));
    pool.choose_multiple(rng, n.min(pool.len())).cloned().collect()
}

/// Deterministic desk-scale database for `seed`.
pub fn generate_synthetic(seed: u64, params: &SynthParams) -> Result<Database, DataError> {
    params.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = params;
    let mut t = Tables::default();

    let mut cities = Vec::new();
    for s in 0..p.states {
        let state = if s < STATES.len() { STATES[s].to_string() } else { format!("Region {s}") };
        for c in 0..p.cities_per_state {
            let city = city_name(s * p.cities_per_state + c);
            t.cities.push((state.clone(), city.clone()));
            cities.push(city);
        }
    }

    let dates: Vec<NaiveDate> =
        (0..p.days).map(|d| p.start_date.checked_add_days(Days::new(d as u64)).expect("date in range")).collect();
    for a in &cities {
        for b in &cities {
            if a == b {
                continue;
            }
            let has_flights = rng.gen_range(0..100) < p.flight_route_percent;
            for date in &dates {
                let count = if has_flights { pick_count(&mut rng, p.flights_per_pair) } else { 0 };
                let mut used = BTreeSet::new();
                for _ in 0..count {
                    let dep = quarter_hour(&mut rng, 5, 21);
                    let airline = p.airlines[rng.gen_range(0..p.airlines.len())].clone();
                    if !used.insert((dep, airline.clone())) {
                        continue;
                    }
                    let length = quarter_hour(&mut rng, 1, 5);
                    let mut arr = dep + length;
                    if arr > Rational::from_integer(24) {
                        arr -= Rational::from_integer(24);
                    }
                    t.flights.push(FlightRecord {
                        origin: a.clone(),
                        destination: b.clone(),
                        date: *date,
                        price: Rational::from_integer(rng.gen_range(p.flight_price.0..=p.flight_price.1)),
                        dep_time: dep,
                        arr_time: arr,
                        airline: Some(airline),
                        nonstop: Some(rng.gen_range(0..100) < p.nonstop_percent),
                    });
                }
            }
            if rng.gen_range(0..100) < p.driving_percent {
                let km = rng.gen_range(p.distance_km.0..=p.distance_km.1);
                t.driving.push(DrivingRecord {
                    origin: a.clone(),
                    destination: b.clone(),
                    distance_km: Rational::from_integer(km),
                    duration_hours: Rational::new(km, 80),
                    duration_text: None,
                });
            }
        }
    }

    for city in &cities {
        let mut names: Vec<usize> = (0..NOUNS.len()).collect();
        names.shuffle(&mut rng);
        for &i in names.iter().take(pick_count(&mut rng, p.restaurants_per_city)) {
            t.restaurants.push(RestaurantRecord {
                city: city.clone(),
                name: format!("The {} {}", ADJECTIVES[(i + city.len()) % ADJECTIVES.len()], NOUNS[i]),
                avg_cost: Rational::from_integer(rng.gen_range(p.restaurant_cost.0..=p.restaurant_cost.1)),
                cuisines: subset(&mut rng, &p.cuisines, 2),
            });
        }
        names.shuffle(&mut rng);
        for &i in names.iter().take(pick_count(&mut rng, p.attractions_per_city)) {
            let categories =
                if p.categories.is_empty() { BTreeSet::new() } else { subset(&mut rng, &p.categories, 2) };
            t.attractions.push(AttractionRecord {
                city: city.clone(),
                name: format!("{} {}", city, SIGHTS[i]),
                categories,
            });
        }
        names.shuffle(&mut rng);
        for &i in names.iter().take(pick_count(&mut rng, p.accommodations_per_city)) {
            let mut house_rules = BTreeSet::new();
            for rule in HouseRule::ALL {
                if rng.gen_range(0..100) < p.house_rule_percent {
                    house_rules.insert(rule);
                }
            }
            t.accommodations.push(AccommodationRecord {
                city: city.clone(),
                name: format!("{} {} {}", ADJECTIVES[i], city, LODGES[i]),
                price: Rational::from_integer(rng.gen_range(p.room_price.0..=p.room_price.1)),
                room_type: RoomType::ALL[rng.gen_range(0..RoomType::ALL.len())],
                house_rules,
                min_nights: rng.gen_range(1..=p.max_min_nights),
                max_occupancy: rng.gen_range(1..=4),
            });
        }
    }

    Database::new(t)
}
