//! The travel sandbox: six static tables, validated and sorted at load.
//!
//! Every list the search functions return is a slice of a table sorted by
//! its key columns, so positions are stable and solver index variables can
//! refer to them directly.

mod csvio;
mod synth;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::PathBuf;

use chrono::NaiveDate;
use num_traits::Zero;

use crate::vocab::{HouseRule, RoomType};
use crate::Rational;

pub use csvio::{load_database, save_database, TABLE_FILES};
pub use synth::{generate_synthetic, SynthParams};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlightRecord {
    pub origin: String,
    pub destination: String,
    pub date: NaiveDate,
    /// Per person.
    pub price: Rational,
    pub dep_time: Rational,
    pub arr_time: Rational,
    pub airline: Option<String>,
    pub nonstop: Option<bool>,
}

impl FlightRecord {
    /// Columns that identify a flight; no two rows share them.
    pub fn key(&self) -> (&str, &str, NaiveDate, &Rational, Option<&str>) {
        (&self.origin, &self.destination, self.date, &self.dep_time, self.airline.as_deref())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DrivingRecord {
    pub origin: String,
    pub destination: String,
    pub distance_km: Rational,
    pub duration_hours: Rational,
    /// Original duration text when the source used `X hours Y mins`.
    pub duration_text: Option<String>,
}

impl DrivingRecord {
    pub fn duration_label(&self) -> String {
        match &self.duration_text {
            Some(t) => t.clone(),
            None => crate::num::hours_text(&self.duration_hours),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestaurantRecord {
    pub city: String,
    pub name: String,
    /// Per person.
    pub avg_cost: Rational,
    pub cuisines: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttractionRecord {
    pub city: String,
    pub name: String,
    pub categories: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccommodationRecord {
    pub city: String,
    pub name: String,
    /// Per room per night.
    pub price: Rational,
    pub room_type: RoomType,
    /// Rules of the form "No X".
    pub house_rules: BTreeSet<HouseRule>,
    pub min_nights: u32,
    pub max_occupancy: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DataError {
    #[error("missing table file {}", .0.display())]
    MissingFile(PathBuf),
    #[error("{file}: {message}")]
    Io { file: String, message: String },
    #[error("{file} row {row}, column {column}: {message}")]
    Field { file: String, row: usize, column: String, message: String },
    #[error("{file} row {row}: unknown city {city:?}")]
    DanglingCity { file: String, row: usize, city: String },
    #[error("{file} row {row}: duplicate {what}")]
    Duplicate { file: String, row: usize, what: String },
    #[error("unknown state {0:?}")]
    UnknownState(String),
    #[error("unknown city {0:?}")]
    UnknownCity(String),
    #[error("contradictory synthetic parameters: {0}")]
    BadParams(String),
}

fn field(file: &str, row: usize, column: &str, message: impl Into<String>) -> DataError {
    DataError::Field { file: file.into(), row, column: column.into(), message: message.into() }
}

/// Raw table contents in file order, before validation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tables {
    /// (state, city) pairs.
    pub cities: Vec<(String, String)>,
    pub flights: Vec<FlightRecord>,
    pub driving: Vec<DrivingRecord>,
    pub restaurants: Vec<RestaurantRecord>,
    pub attractions: Vec<AttractionRecord>,
    pub accommodations: Vec<AccommodationRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Database {
    cities_by_state: BTreeMap<String, Vec<String>>,
    state_of: HashMap<String, String>,
    flights: Vec<FlightRecord>,
    driving: Vec<DrivingRecord>,
    restaurants: Vec<RestaurantRecord>,
    attractions: Vec<AttractionRecord>,
    accommodations: Vec<AccommodationRecord>,
}

impl Database {
    /// Validates the tables and sorts every list by its key columns. Row
    /// numbers in errors are 1-based positions in the given vectors.
    pub fn new(tables: Tables) -> Result<Self, DataError> {
        let Tables { cities, mut flights, mut driving, mut restaurants, mut attractions, mut accommodations } = tables;

        let mut state_of = HashMap::new();
        let mut cities_by_state: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (i, (state, city)) in cities.iter().enumerate() {
            let row = i + 1;
            if state.trim().is_empty() {
                return Err(field("cities.csv", row, "state", "empty state"));
            }
            if city.trim().is_empty() {
                return Err(field("cities.csv", row, "city", "empty city"));
            }
            if state_of.insert(city.clone(), state.clone()).is_some() {
                return Err(DataError::Duplicate { file: "cities.csv".into(), row, what: format!("city {city:?}") });
            }
            cities_by_state.entry(state.clone()).or_default().push(city.clone());
        }
        for list in cities_by_state.values_mut() {
            list.sort();
        }
        let known = |file: &str, row: usize, city: &str| {
            if state_of.contains_key(city) {
                Ok(())
            } else {
                Err(DataError::DanglingCity { file: file.into(), row, city: city.into() })
            }
        };

        for (i, f) in flights.iter().enumerate() {
            let row = i + 1;
            known("flights.csv", row, &f.origin)?;
            known("flights.csv", row, &f.destination)?;
            if f.price < Rational::zero() {
                return Err(field("flights.csv", row, "price", "negative price"));
            }
            let day = Rational::from_integer(24);
            if f.arr_time < Rational::zero() || f.arr_time > day {
                return Err(field("flights.csv", row, "arr_time", "arrival hour outside [0, 24]"));
            }
            if f.dep_time < Rational::zero() || f.dep_time > day {
                return Err(field("flights.csv", row, "dep_time", "departure hour outside [0, 24]"));
            }
        }
        for (i, d) in driving.iter().enumerate() {
            let row = i + 1;
            known("driving.csv", row, &d.origin)?;
            known("driving.csv", row, &d.destination)?;
            if d.distance_km <= Rational::zero() {
                return Err(field("driving.csv", row, "distance_km", "distance must be positive"));
            }
            if d.duration_hours <= Rational::zero() {
                return Err(field("driving.csv", row, "duration_hours", "duration must be positive"));
            }
        }
        for (i, r) in restaurants.iter().enumerate() {
            let row = i + 1;
            known("restaurants.csv", row, &r.city)?;
            if r.name.trim().is_empty() {
                return Err(field("restaurants.csv", row, "name", "empty name"));
            }
            if r.avg_cost < Rational::zero() {
                return Err(field("restaurants.csv", row, "avg_cost", "negative cost"));
            }
        }
        for (i, a) in attractions.iter().enumerate() {
            let row = i + 1;
            known("attractions.csv", row, &a.city)?;
            if a.name.trim().is_empty() {
                return Err(field("attractions.csv", row, "name", "empty name"));
            }
        }
        for (i, a) in accommodations.iter().enumerate() {
            let row = i + 1;
            known("accommodations.csv", row, &a.city)?;
            if a.name.trim().is_empty() {
                return Err(field("accommodations.csv", row, "name", "empty name"));
            }
            if a.price < Rational::zero() {
                return Err(field("accommodations.csv", row, "price", "negative price"));
            }
            if a.min_nights < 1 {
                return Err(field("accommodations.csv", row, "min_nights", "must be at least 1"));
            }
            if a.max_occupancy < 1 {
                return Err(field("accommodations.csv", row, "max_occupancy", "must be at least 1"));
            }
        }

        unique("flights.csv", &flights, |f| f.key(), "flight")?;
        unique("driving.csv", &driving, |d| (d.origin.clone(), d.destination.clone()), "route")?;
        unique("restaurants.csv", &restaurants, |r| (r.city.clone(), r.name.clone()), "restaurant")?;
        unique("attractions.csv", &attractions, |a| (a.city.clone(), a.name.clone()), "attraction")?;
        unique("accommodations.csv", &accommodations, |a| (a.city.clone(), a.name.clone()), "accommodation")?;

        flights.sort_by(|a, b| a.key().cmp(&b.key()));
        driving.sort_by(|a, b| (&a.origin, &a.destination).cmp(&(&b.origin, &b.destination)));
        restaurants.sort_by(|a, b| (&a.city, &a.name).cmp(&(&b.city, &b.name)));
        attractions.sort_by(|a, b| (&a.city, &a.name).cmp(&(&b.city, &b.name)));
        accommodations.sort_by(|a, b| (&a.city, &a.name).cmp(&(&b.city, &b.name)));

        Ok(Database { cities_by_state, state_of, flights, driving, restaurants, attractions, accommodations })
    }

    /// Tables in sorted order, suitable for writing back out.
    pub fn tables(&self) -> Tables {
        Tables {
            cities: self
                .cities_by_state
                .iter()
                .flat_map(|(s, cs)| cs.iter().map(move |c| (s.clone(), c.clone())))
                .collect(),
            flights: self.flights.clone(),
            driving: self.driving.clone(),
            restaurants: self.restaurants.clone(),
            attractions: self.attractions.clone(),
            accommodations: self.accommodations.clone(),
        }
    }

    pub fn cities_by_state(&self) -> &BTreeMap<String, Vec<String>> {
        &self.cities_by_state
    }

    pub fn states(&self) -> impl Iterator<Item = &str> {
        self.cities_by_state.keys().map(String::as_str)
    }

    /// All cities, grouped by state in state order.
    pub fn cities(&self) -> impl Iterator<Item = &str> {
        self.cities_by_state.values().flatten().map(String::as_str)
    }

    pub fn has_city(&self, city: &str) -> bool {
        self.state_of.contains_key(city)
    }

    pub fn state_of(&self, city: &str) -> Option<&str> {
        self.state_of.get(city).map(String::as_str)
    }

    pub fn flights(&self) -> &[FlightRecord] {
        &self.flights
    }

    pub fn driving(&self) -> &[DrivingRecord] {
        &self.driving
    }

    pub fn restaurants(&self) -> &[RestaurantRecord] {
        &self.restaurants
    }

    pub fn attractions(&self) -> &[AttractionRecord] {
        &self.attractions
    }

    pub fn accommodations(&self) -> &[AccommodationRecord] {
        &self.accommodations
    }

    fn city(&self, city: &str) -> Result<(), DataError> {
        if self.has_city(city) {
            Ok(())
        } else {
            Err(DataError::UnknownCity(city.into()))
        }
    }

    /// Cities of `state` in name order, without `origin`.
    pub fn city_search(&self, state: &str, origin: &str) -> Result<Vec<String>, DataError> {
        let list = self.cities_by_state.get(state).ok_or_else(|| DataError::UnknownState(state.into()))?;
        Ok(list.iter().filter(|c| c.as_str() != origin).cloned().collect())
    }

    /// Flights on one route and date, ordered by departure time then airline.
    pub fn flight_table(&self, origin: &str, destination: &str, date: NaiveDate) -> Result<&[FlightRecord], DataError> {
        self.city(origin)?;
        self.city(destination)?;
        let key = (origin, destination, date);
        let lo = self.flights.partition_point(|f| (f.origin.as_str(), f.destination.as_str(), f.date) < key);
        let hi = self.flights.partition_point(|f| (f.origin.as_str(), f.destination.as_str(), f.date) <= key);
        Ok(&self.flights[lo..hi])
    }

    /// Flights leaving `origin` on `date`, any destination.
    pub fn flights_from(&self, origin: &str, date: NaiveDate) -> Result<Vec<&FlightRecord>, DataError> {
        self.city(origin)?;
        let lo = self.flights.partition_point(|f| f.origin.as_str() < origin);
        let hi = self.flights.partition_point(|f| f.origin.as_str() <= origin);
        Ok(self.flights[lo..hi].iter().filter(|f| f.date == date).collect())
    }

    pub fn driving_lookup(&self, origin: &str, destination: &str) -> Result<Option<&DrivingRecord>, DataError> {
        self.city(origin)?;
        self.city(destination)?;
        Ok(self
            .driving
            .binary_search_by(|d| (d.origin.as_str(), d.destination.as_str()).cmp(&(origin, destination)))
            .ok()
            .map(|i| &self.driving[i]))
    }

    /// Routes leaving `origin` by road.
    pub fn driving_from(&self, origin: &str) -> Result<&[DrivingRecord], DataError> {
        self.city(origin)?;
        let lo = self.driving.partition_point(|d| d.origin.as_str() < origin);
        let hi = self.driving.partition_point(|d| d.origin.as_str() <= origin);
        Ok(&self.driving[lo..hi])
    }

    pub fn restaurants_in(&self, city: &str) -> Result<&[RestaurantRecord], DataError> {
        self.city(city)?;
        Ok(by_city(&self.restaurants, city, |r| &r.city))
    }

    pub fn attractions_in(&self, city: &str) -> Result<&[AttractionRecord], DataError> {
        self.city(city)?;
        Ok(by_city(&self.attractions, city, |a| &a.city))
    }

    pub fn accommodations_in(&self, city: &str) -> Result<&[AccommodationRecord], DataError> {
        self.city(city)?;
        Ok(by_city(&self.accommodations, city, |a| &a.city))
    }
}

fn by_city<'a, T>(rows: &'a [T], city: &str, key: impl Fn(&T) -> &String) -> &'a [T] {
    let lo = rows.partition_point(|r| key(r).as_str() < city);
    let hi = rows.partition_point(|r| key(r).as_str() <= city);
    &rows[lo..hi]
}

fn unique<'a, T, K: Ord>(file: &str, rows: &'a [T], key: impl Fn(&'a T) -> K, what: &str) -> Result<(), DataError> {
    let mut seen = BTreeSet::new();
    for (i, r) in rows.iter().enumerate() {
        if !seen.insert(key(r)) {
            return Err(DataError::Duplicate { file: file.into(), row: i + 1, what: what.into() });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Tables {
        Tables {
            cities: vec![("S".into(), "C".into()), ("S".into(), "A".into()), ("S".into(), "B".into())],
            ..Tables::default()
        }
    }

    #[test]
    fn city_search_removes_origin() {
        let db = Database::new(tiny()).unwrap();
        assert_eq!(db.city_search("S", "A").unwrap(), vec!["B", "C"]);
        assert_eq!(db.city_search("S", "Z").unwrap(), vec!["A", "B", "C"]);
        assert_eq!(db.city_search("T", "A"), Err(DataError::UnknownState("T".into())));
    }

    #[test]
    fn duplicate_city_is_rejected() {
        let mut t = tiny();
        t.cities.push(("T".into(), "A".into()));
        assert!(matches!(Database::new(t), Err(DataError::Duplicate { row: 4, .. })));
    }

    #[test]
    fn dangling_city_is_rejected() {
        let mut t = tiny();
        t.attractions.push(AttractionRecord { city: "Q".into(), name: "x".into(), categories: BTreeSet::new() });
        assert_eq!(
            Database::new(t),
            Err(DataError::DanglingCity { file: "attractions.csv".into(), row: 1, city: "Q".into() })
        );
    }
}
