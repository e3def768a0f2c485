use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::data::{DataError, Database};
use crate::num::{clock, format_rational};
use crate::vocab::{self, HouseRule, RoomType, UnknownTag};
use crate::Rational;

/// Database lookups available while looking for a suggestion. The wire form
/// is `Name[arg, arg]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InfoAction {
    FlightCheck { from: String, to: String, date: NaiveDate },
    FlightSearchFrom { from: String, date: NaiveDate },
    DrivingCheck { from: String, to: String },
    DrivingSearchFrom { from: String },
    AirlineSearch { airline: String },
    AttractionSearch { city: String },
    CategorySearch { category: String },
    CuisineSearch { cuisine: String },
    AccommodationTypesIn { city: String },
    TypeSearch { room_type: RoomType },
}

impl fmt::Display for InfoAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InfoAction::FlightCheck { from, to, date } => write!(f, "FlightCheck[{from}, {to}, {date}]"),
            InfoAction::FlightSearchFrom { from, date } => write!(f, "FlightSearchFrom[{from}, {date}]"),
            InfoAction::DrivingCheck { from, to } => write!(f, "DrivingCheck[{from}, {to}]"),
            InfoAction::DrivingSearchFrom { from } => write!(f, "DrivingSearchFrom[{from}]"),
            InfoAction::AirlineSearch { airline } => write!(f, "AirlineSearch[{airline}]"),
            InfoAction::AttractionSearch { city } => write!(f, "AttractionSearch[{city}]"),
            InfoAction::CategorySearch { category } => write!(f, "CategorySearch[{category}]"),
            InfoAction::CuisineSearch { cuisine } => write!(f, "CuisineSearch[{cuisine}]"),
            InfoAction::AccommodationTypesIn { city } => write!(f, "AccommodationTypesIn[{city}]"),
            InfoAction::TypeSearch { room_type } => write!(f, "TypeSearch[{room_type}]"),
        }
    }
}

impl FromStr for InfoAction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let t = s.trim();
        let (name, rest) = t.split_once('[').ok_or_else(|| format!("not an action: {t:?}"))?;
        let inner = rest.strip_suffix(']').ok_or_else(|| format!("unterminated action: {t:?}"))?;
        let args: Vec<String> = inner.split(',').map(|a| a.trim().to_string()).filter(|a| !a.is_empty()).collect();
        let want = |n: usize| -> Result<(), String> {
            if args.len() == n {
                Ok(())
            } else {
                Err(format!("{} takes {n} argument(s), got {}", name.trim(), args.len()))
            }
        };
        let date = |a: &str| NaiveDate::parse_from_str(a, "%Y-%m-%d").map_err(|_| format!("bad date {a:?}"));
        Ok(match name.trim() {
            "FlightCheck" => {
                want(3)?;
                InfoAction::FlightCheck { from: args[0].clone(), to: args[1].clone(), date: date(&args[2])? }
            }
            "FlightSearchFrom" | "FlightSearch" => {
                want(2)?;
                InfoAction::FlightSearchFrom { from: args[0].clone(), date: date(&args[1])? }
            }
            "DrivingCheck" => {
                want(2)?;
                InfoAction::DrivingCheck { from: args[0].clone(), to: args[1].clone() }
            }
            "DrivingSearchFrom" | "DrivingSearch" => {
                want(1)?;
                InfoAction::DrivingSearchFrom { from: args[0].clone() }
            }
            "AirlineSearch" => {
                want(1)?;
                InfoAction::AirlineSearch { airline: args[0].clone() }
            }
            "AttractionSearch" => {
                want(1)?;
                InfoAction::AttractionSearch { city: args[0].clone() }
            }
            "CategorySearch" => {
                want(1)?;
                InfoAction::CategorySearch { category: args[0].clone() }
            }
            "CuisineSearch" => {
                want(1)?;
                InfoAction::CuisineSearch { cuisine: args[0].clone() }
            }
            "AccommodationTypesIn" | "AccommodationSearch" => {
                want(1)?;
                InfoAction::AccommodationTypesIn { city: args[0].clone() }
            }
            "TypeSearch" => {
                want(1)?;
                InfoAction::TypeSearch { room_type: args[0].parse().map_err(|e: UnknownTag| e.to_string())? }
            }
            other => return Err(format!("unknown action {other:?}")),
        })
    }
}

impl Serialize for InfoAction {
    fn serialize<Z: Serializer>(&self, s: Z) -> Result<Z::Ok, Z::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for InfoAction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlightInfo {
    pub origin: String,
    pub destination: String,
    pub date: NaiveDate,
    pub departure: String,
    pub arrival: String,
    pub airline: Option<String>,
    pub nonstop: Option<bool>,
    #[serde(with = "crate::query::amount")]
    pub price: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AttractionInfo {
    pub name: String,
    pub categories: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AccommodationInfo {
    pub name: String,
    pub room_type: RoomType,
    pub house_rules: BTreeSet<HouseRule>,
    pub min_nights: u32,
    #[serde(with = "crate::query::amount")]
    pub price: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum InfoResult {
    Flights(Vec<FlightInfo>),
    Driving(Option<DrivingInfo>),
    Cities(Vec<String>),
    Attractions(Vec<AttractionInfo>),
    Accommodations(Vec<AccommodationInfo>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DrivingInfo {
    #[serde(with = "crate::query::amount")]
    pub distance_km: Rational,
    pub duration: String,
}

impl InfoResult {
    /// False for an empty answer.
    pub fn feasible(&self) -> bool {
        match self {
            InfoResult::Flights(v) => !v.is_empty(),
            InfoResult::Driving(d) => d.is_some(),
            InfoResult::Cities(v) => !v.is_empty(),
            InfoResult::Attractions(v) => !v.is_empty(),
            InfoResult::Accommodations(v) => !v.is_empty(),
        }
    }

    pub fn cities(&self) -> &[String] {
        match self {
            InfoResult::Cities(v) => v,
            _ => &[],
        }
    }

    pub fn flights(&self) -> &[FlightInfo] {
        match self {
            InfoResult::Flights(v) => v,
            _ => &[],
        }
    }

    /// One-line text for transcripts and prompts.
    pub fn summary(&self) -> String {
        match self {
            InfoResult::Flights(v) if v.is_empty() => "no flights".into(),
            InfoResult::Flights(v) => v
                .iter()
                .map(|f| {
                    format!(
                        "{} to {} on {} at {} ({}, {}, price {})",
                        f.origin,
                        f.destination,
                        f.date,
                        f.departure,
                        f.airline.as_deref().unwrap_or("unknown airline"),
                        match f.nonstop {
                            Some(true) => "non-stop",
                            Some(false) => "with stops",
                            None => "stops unknown",
                        },
                        format_rational(&f.price)
                    )
                })
                .collect::<Vec<_>>()
                .join("; "),
            InfoResult::Driving(None) => "no road route".into(),
            InfoResult::Driving(Some(d)) => {
                format!("{} km, {}", format_rational(&d.distance_km), d.duration)
            }
            InfoResult::Cities(v) if v.is_empty() => "no cities".into(),
            InfoResult::Cities(v) => v.join(", "),
            InfoResult::Attractions(v) if v.is_empty() => "no attractions".into(),
            InfoResult::Attractions(v) => v
                .iter()
                .map(|a| format!("{} ({})", a.name, a.categories.iter().cloned().collect::<Vec<_>>().join(", ")))
                .collect::<Vec<_>>()
                .join("; "),
            InfoResult::Accommodations(v) if v.is_empty() => "no accommodations".into(),
            InfoResult::Accommodations(v) => v
                .iter()
                .map(|a| {
                    let rules: Vec<String> = a.house_rules.iter().map(|r| r.prohibition()).collect();
                    format!(
                        "{} ({}, at least {} nights{}{})",
                        a.name,
                        a.room_type,
                        a.min_nights,
                        if rules.is_empty() { "" } else { ", " },
                        rules.join(", ")
                    )
                })
                .collect::<Vec<_>>()
                .join("; "),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CollectError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Tag(#[from] UnknownTag),
}

fn flight_info(f: &crate::data::FlightRecord) -> FlightInfo {
    FlightInfo {
        origin: f.origin.clone(),
        destination: f.destination.clone(),
        date: f.date,
        departure: clock(&f.dep_time),
        arrival: clock(&f.arr_time),
        airline: f.airline.clone(),
        nonstop: f.nonstop,
        price: f.price,
    }
}

fn known(db: &Database, city: &str) -> Result<(), CollectError> {
    if db.has_city(city) {
        Ok(())
    } else {
        Err(DataError::UnknownCity(city.to_string()).into())
    }
}

/// Answers `action` from the database. City lists follow table order.
pub fn collect(action: &InfoAction, db: &Database) -> Result<InfoResult, CollectError> {
    Ok(match action {
        InfoAction::FlightCheck { from, to, date } => {
            InfoResult::Flights(db.flight_table(from, to, *date)?.iter().map(flight_info).collect())
        }
        InfoAction::FlightSearchFrom { from, date } => {
            let found: BTreeSet<&str> = db.flights_from(from, *date)?.iter().map(|f| f.destination.as_str()).collect();
            InfoResult::Cities(db.cities().filter(|c| found.contains(c)).map(String::from).collect())
        }
        InfoAction::DrivingCheck { from, to } => InfoResult::Driving(
            db.driving_lookup(from, to)?
                .map(|d| DrivingInfo { distance_km: d.distance_km, duration: d.duration_label() }),
        ),
        InfoAction::DrivingSearchFrom { from } => {
            let found: BTreeSet<&str> = db.driving_from(from)?.iter().map(|d| d.destination.as_str()).collect();
            InfoResult::Cities(db.cities().filter(|c| found.contains(c)).map(String::from).collect())
        }
        InfoAction::AirlineSearch { airline } => InfoResult::Flights(
            db.flights().iter().filter(|f| f.airline.as_deref() == Some(airline.as_str())).map(flight_info).collect(),
        ),
        InfoAction::AttractionSearch { city } => {
            known(db, city)?;
            InfoResult::Attractions(
                db.attractions_in(city)?
                    .iter()
                    .map(|a| AttractionInfo { name: a.name.clone(), categories: a.categories.clone() })
                    .collect(),
            )
        }
        InfoAction::CategorySearch { category } => {
            let tag = vocab::category(category)?;
            let found: BTreeSet<&str> =
                db.attractions().iter().filter(|a| a.categories.contains(tag)).map(|a| a.city.as_str()).collect();
            InfoResult::Cities(db.cities().filter(|c| found.contains(c)).map(String::from).collect())
        }
        InfoAction::CuisineSearch { cuisine } => {
            let tag = vocab::cuisine(cuisine)?;
            let found: BTreeSet<&str> =
                db.restaurants().iter().filter(|r| r.cuisines.contains(tag)).map(|r| r.city.as_str()).collect();
            InfoResult::Cities(db.cities().filter(|c| found.contains(c)).map(String::from).collect())
        }
        InfoAction::AccommodationTypesIn { city } => {
            known(db, city)?;
            InfoResult::Accommodations(
                db.accommodations_in(city)?
                    .iter()
                    .map(|a| AccommodationInfo {
                        name: a.name.clone(),
                        room_type: a.room_type,
                        house_rules: a.house_rules.clone(),
                        min_nights: a.min_nights,
                        price: a.price,
                    })
                    .collect(),
            )
        }
        InfoAction::TypeSearch { room_type } => {
            let found: BTreeSet<&str> = db
                .accommodations()
                .iter()
                .filter(|a| a.room_type == *room_type)
                .map(|a| a.city.as_str())
                .collect();
            InfoResult::Cities(db.cities().filter(|c| found.contains(c)).map(String::from).collect())
        }
    })
}
