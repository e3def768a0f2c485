//! Day-by-day itineraries: extraction from a model, the textual formats of
//! each field, verification and aggregate metrics.

mod metrics;
mod verify;

use serde::{Deserialize, Serialize};
use tripsolve_engine::{evaluate, Formula, Model};

use crate::data::{DrivingRecord, FlightRecord};
use crate::encoder::{Encoding, EncodingParams, Meal};
use crate::num::{clock, grouped, round};
use crate::Rational;

pub use metrics::{aggregate, Metrics, MetricsError};
pub use verify::{hard_check_names, undelivered, verify, CheckResult, VerificationReport, COMMONSENSE_CHECKS};

/// Placeholder for an empty field.
pub const NONE: &str = "-";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DayRecord {
    /// 1-based.
    pub days: usize,
    pub current_city: String,
    pub transportation: String,
    pub breakfast: String,
    pub attraction: String,
    pub lunch: String,
    pub dinner: String,
    pub accommodation: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Plan {
    pub days: Vec<DayRecord>,
}

impl Plan {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plans serialize")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Plan, serde_json::Error> {
        Plan::deserialize(value)
    }
}

impl DayRecord {
    pub fn meal(&self, meal: Meal) -> &str {
        match meal {
            Meal::Breakfast => &self.breakfast,
            Meal::Lunch => &self.lunch,
            Meal::Dinner => &self.dinner,
        }
    }

    fn meal_mut(&mut self, meal: Meal) -> &mut String {
        match meal {
            Meal::Breakfast => &mut self.breakfast,
            Meal::Lunch => &mut self.lunch,
            Meal::Dinner => &mut self.dinner,
        }
    }

    /// Attraction entries of the day, empty when the field is `-`.
    pub fn attractions(&self) -> Vec<&str> {
        if self.attraction.trim() == NONE {
            return Vec::new();
        }
        self.attraction.split("; ").map(str::trim).filter(|s| !s.is_empty()).collect()
    }
}

pub fn entity(name: &str, city: &str) -> String {
    format!("{name}, {city}")
}

/// Splits `Name, City` at the last comma; names may contain commas.
pub fn parse_entity(text: &str) -> Option<(&str, &str)> {
    let (name, city) = text.rsplit_once(", ")?;
    let (name, city) = (name.trim(), city.trim());
    (!name.is_empty() && !city.is_empty()).then_some((name, city))
}

pub fn travel_city(from: &str, to: &str) -> String {
    format!("from {from} to {to}")
}

pub fn parse_travel_city(text: &str) -> Option<(&str, &str)> {
    text.strip_prefix("from ")?.split_once(" to ")
}

pub fn flight_text(f: &FlightRecord, people: u32) -> String {
    format!(
        "Flight, from {} to {}, departure: {}, arrival: {}, airline: {}, cost: {}",
        f.origin,
        f.destination,
        clock(&f.dep_time),
        clock(&f.arr_time),
        f.airline.as_deref().unwrap_or("unknown"),
        round(&(f.price * Rational::from_integer(people as i64)))
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroundMode {
    SelfDriving,
    Taxi,
}

impl GroundMode {
    pub fn as_str(self) -> &'static str {
        match self {
            GroundMode::SelfDriving => "Self-driving",
            GroundMode::Taxi => "Taxi",
        }
    }
}

pub fn ground_text(mode: GroundMode, d: &DrivingRecord, people: u32, params: &EncodingParams) -> String {
    let cost = match mode {
        GroundMode::SelfDriving => params.self_driving_cost(&d.distance_km, people),
        GroundMode::Taxi => params.taxi_cost(&d.distance_km, people),
    };
    format!(
        "{}, from {} to {}, duration: {}, distance: {} km, cost: {}",
        mode.as_str(),
        d.origin,
        d.destination,
        d.duration_label(),
        grouped(&d.distance_km),
        round(&cost)
    )
}

/// Fields of a transportation string, as written by [`flight_text`] and
/// [`ground_text`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Transport {
    Flight { from: String, to: String, departure: Rational, airline: Option<String> },
    Ground { mode: GroundMode, from: String, to: String },
}

impl Transport {
    pub fn endpoints(&self) -> (&str, &str) {
        match self {
            Transport::Flight { from, to, .. } | Transport::Ground { from, to, .. } => (from, to),
        }
    }
}

pub fn parse_transport(text: &str) -> Option<Transport> {
    let mut parts = text.split(", ");
    let kind = parts.next()?.trim();
    let (from, to) = parse_travel_city(parts.next()?.trim())?;
    let (from, to) = (from.to_string(), to.to_string());
    let mut fields = std::collections::BTreeMap::new();
    for p in parts {
        let (k, v) = p.split_once(": ")?;
        fields.insert(k.trim(), v.trim());
    }
    match kind {
        "Flight" => {
            let departure = crate::num::parse_clock(fields.get("departure")?)?;
            let airline = match fields.get("airline").copied() {
                None | Some("unknown") => None,
                Some(a) => Some(a.to_string()),
            };
            Some(Transport::Flight { from, to, departure, airline })
        }
        "Self-driving" => Some(Transport::Ground { mode: GroundMode::SelfDriving, from, to }),
        "Taxi" => Some(Transport::Ground { mode: GroundMode::Taxi, from, to }),
        _ => None,
    }
}

fn int_of(model: &Model, term: &Formula) -> i64 {
    let v = evaluate(model, term).expect("encoding terms evaluate under their own models");
    v.as_num().expect("numeric term").to_integer()
}

/// Reads the itinerary chosen by `model`.
pub fn extract_plan(enc: &Encoding, model: &Model, params: &EncodingParams) -> Plan {
    let t = &enc.terms;
    let n = enc.days;
    let deps: Vec<i64> = t.departure_dates.iter().map(|d| model.value(*d)).collect();
    let timeline: Vec<i64> = t.city_timeline.iter().map(|term| int_of(model, term)).collect();
    let city_name = |i: i64| -> &str {
        if i < 0 {
            &enc.legs[0].from
        } else {
            &enc.tuple[i as usize]
        }
    };
    let mut days: Vec<DayRecord> = (0..n)
        .map(|d| DayRecord {
            days: d + 1,
            current_city: city_name(timeline[d + 1]).to_string(),
            transportation: NONE.into(),
            breakfast: NONE.into(),
            attraction: NONE.into(),
            lunch: NONE.into(),
            dinner: NONE.into(),
            accommodation: NONE.into(),
        })
        .collect();
    for (i, leg) in enc.legs.iter().enumerate() {
        let day = &mut days[deps[i] as usize];
        day.current_city = travel_city(&leg.from, &leg.to);
        day.transportation = if model.flag(t.flight[i]) {
            let idx = model.value(t.flight_index[i]) as usize;
            flight_text(&leg.flights[deps[i] as usize][idx], enc.people)
        } else {
            let mode = if model.flag(t.self_driving[i]) { GroundMode::SelfDriving } else { GroundMode::Taxi };
            match &leg.driving {
                Some(d) => ground_text(mode, d, enc.people, params),
                None => NONE.into(),
            }
        };
    }
    for slot in &t.meals {
        let c = model.value(slot.city);
        if c >= 0 {
            let r = &enc.restaurants[c as usize][model.value(slot.index) as usize];
            *days[slot.day].meal_mut(slot.meal) = entity(&r.name, &r.city);
        }
    }
    let mut visits: Vec<Vec<String>> = vec![Vec::new(); n];
    for slot in &t.attractions {
        let c = model.value(slot.city);
        if c >= 0 {
            let a = &enc.attractions[c as usize][model.value(slot.index) as usize];
            visits[slot.day].push(entity(&a.name, &a.city));
        }
    }
    for (day, v) in days.iter_mut().zip(visits) {
        if !v.is_empty() {
            day.attraction = v.join("; ");
        }
    }
    for d in 0..n.saturating_sub(1) {
        let c = timeline[d + 1];
        if c >= 0 {
            let rows = &enc.accommodations[c as usize];
            let idx = model.value(t.accommodation_index[c as usize]) as usize;
            if let Some(a) = rows.get(idx) {
                days[d].accommodation = entity(&a.name, &a.city);
            }
        }
    }
    Plan { days }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entity_split_uses_last_comma() {
        assert_eq!(parse_entity("Joe's, Bar and Grill, Austin"), Some(("Joe's, Bar and Grill", "Austin")));
        assert_eq!(parse_entity("-"), None);
    }

    #[test]
    fn transport_round_trip() {
        let f = FlightRecord {
            origin: "A".into(),
            destination: "B".into(),
            date: chrono::NaiveDate::from_ymd_opt(2024, 3, 1).unwrap(),
            price: Rational::from_integer(120),
            dep_time: Rational::new(49, 6),
            arr_time: Rational::from_integer(11),
            airline: Some("Delta".into()),
            nonstop: None,
        };
        let text = flight_text(&f, 2);
        assert_eq!(text, "Flight, from A to B, departure: 08:10, arrival: 11:00, airline: Delta, cost: 240");
        assert_eq!(
            parse_transport(&text),
            Some(Transport::Flight {
                from: "A".into(),
                to: "B".into(),
                departure: Rational::new(49, 6),
                airline: Some("Delta".into())
            })
        );
        let d = DrivingRecord {
            origin: "A".into(),
            destination: "B".into(),
            distance_km: Rational::from_integer(1821),
            duration_hours: Rational::new(986, 60),
            duration_text: None,
        };
        let text = ground_text(GroundMode::Taxi, &d, 3, &EncodingParams::default());
        assert_eq!(text, "Taxi, from A to B, duration: 16 hours 26 mins, distance: 1,821 km, cost: 1821");
        assert_eq!(parse_transport(&text).unwrap().endpoints(), ("A", "B"));
    }
}
