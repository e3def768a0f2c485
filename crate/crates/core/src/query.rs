//! The structured query: what the traveler asked for.
//!
//! JSON field names follow the benchmark query shape (`org`, `dest`,
//! `local_constraint` with keys such as `"house rule"` and `"flight rule"`).
//! `attractions_per_day` and `meals_per_day` are extensions with defaults
//! 1 and 3.

use std::collections::BTreeSet;
use std::fmt;

use chrono::NaiveDate;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Map, Value};

use crate::num::{format_rational, parse_rational};
use crate::vocab::{self, FlightRule, HouseRule, HouseType, Transportation};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Destination {
    /// Visit exactly these cities, in some order.
    Cities(Vec<String>),
    /// Visit `visiting_city_number` cities of this state.
    State(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LocalConstraint {
    pub house_rule: Option<HouseRule>,
    pub cuisines: Option<BTreeSet<String>>,
    pub house_type: Option<HouseType>,
    pub transportation: Option<Transportation>,
    pub flight_rule: Option<FlightRule>,
    pub airlines: Option<BTreeSet<String>>,
    pub attraction_category: Option<BTreeSet<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub org: String,
    pub dest: Destination,
    pub visiting_city_number: usize,
    pub days: usize,
    pub date: Vec<NaiveDate>,
    pub people_number: u32,
    pub local_constraint: LocalConstraint,
    pub budget: Rational,
    pub attractions_per_day: usize,
    pub meals_per_day: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error("invalid JSON: {0}")]
    Syntax(String),
    #[error("schema violation at {pointer:?}: {message}")]
    Schema { pointer: String, message: String },
    #[error("unknown {vocabulary} tag {tag:?} at {pointer:?}")]
    Vocabulary { pointer: String, vocabulary: String, tag: String },
    #[error("modification {0} does not apply: {1}")]
    Inapplicable(String, String),
}

impl QueryError {
    pub fn pointer(&self) -> Option<&str> {
        match self {
            QueryError::Schema { pointer, .. } | QueryError::Vocabulary { pointer, .. } => Some(pointer),
            _ => None,
        }
    }
}

fn schema(pointer: &str, message: impl Into<String>) -> QueryError {
    QueryError::Schema { pointer: pointer.into(), message: message.into() }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawDest {
    State(String),
    Cities(Vec<String>),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawAmount {
    Number(serde_json::Number),
    Text(String),
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawLocal {
    #[serde(rename = "house rule", alias = "house_rule", default)]
    house_rule: Option<String>,
    #[serde(rename = "cuisine", alias = "cuisines", default)]
    cuisine: Option<Vec<String>>,
    #[serde(rename = "room type", alias = "room_type", alias = "house type", alias = "house_type", default)]
    room_type: Option<String>,
    #[serde(default)]
    transportation: Option<String>,
    #[serde(rename = "flight rule", alias = "flight_rule", default)]
    flight_rule: Option<String>,
    #[serde(default)]
    airlines: Option<Vec<String>>,
    #[serde(default)]
    attraction_category: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuery {
    org: String,
    dest: RawDest,
    days: usize,
    #[serde(default)]
    visiting_city_number: Option<usize>,
    date: Vec<String>,
    people_number: u32,
    #[serde(default)]
    local_constraint: Option<RawLocal>,
    budget: RawAmount,
    #[serde(default)]
    attractions_per_day: Option<usize>,
    #[serde(default)]
    meals_per_day: Option<usize>,
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

/// Reads an exact amount from a JSON number or a decimal/fraction string.
pub fn amount_from_json(value: &Value) -> Result<Rational, String> {
    match value {
        Value::Number(n) => parse_rational(&n.to_string()),
        Value::String(s) => parse_rational(s),
        _ => Err("expected a number".into()),
    }
}

/// JSON number when the amount has a finite decimal form, otherwise a
/// fraction string.
pub fn amount_to_json(r: &Rational) -> Value {
    let text = format_rational(r);
    match serde_json::from_str::<serde_json::Number>(&text) {
        Ok(n) if !text.contains('/') => Value::Number(n),
        _ => Value::String(text),
    }
}

/// Serde adapter for exact amounts.
pub mod amount {
    use super::*;

    pub fn serialize<Z: Serializer>(r: &Rational, s: Z) -> Result<Z::Ok, Z::Error> {
        amount_to_json(r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let v = Value::deserialize(d)?;
        amount_from_json(&v).map_err(serde::de::Error::custom)
    }
}

fn tag<T: std::str::FromStr<Err = vocab::UnknownTag>>(pointer: &str, text: &str) -> Result<T, QueryError> {
    text.parse().map_err(|e: vocab::UnknownTag| QueryError::Vocabulary {
        pointer: pointer.into(),
        vocabulary: e.vocabulary.into(),
        tag: e.tag,
    })
}

fn tag_set(
    pointer: &str,
    items: Option<Vec<String>>,
    canon: impl Fn(&str) -> Result<String, vocab::UnknownTag>,
) -> Result<Option<BTreeSet<String>>, QueryError> {
    let Some(items) = items else { return Ok(None) };
    if items.is_empty() {
        return Err(schema(pointer, "empty list; use null to drop the constraint"));
    }
    let mut out = BTreeSet::new();
    for (i, item) in items.iter().enumerate() {
        let c = canon(item).map_err(|e| QueryError::Vocabulary {
            pointer: format!("{pointer}/{i}"),
            vocabulary: e.vocabulary.into(),
            tag: e.tag,
        })?;
        out.insert(c);
    }
    Ok(Some(out))
}

/// Parses and validates a query document.
pub fn parse_query(text: &str) -> Result<Query, QueryError> {
    let value: Value = serde_json::from_str(text).map_err(|e| QueryError::Syntax(e.to_string()))?;
    parse_query_value(&value)
}

/// Same as [`parse_query`] for an already-parsed JSON value.
pub fn parse_query_value(value: &Value) -> Result<Query, QueryError> {
    let raw: RawQuery = serde_path_to_error::deserialize(value).map_err(|e| {
        let pointer = pointer_of(e.path());
        schema(&pointer, e.into_inner().to_string())
    })?;
    let local = raw.local_constraint.unwrap_or_default();
    let lc = LocalConstraint {
        house_rule: local.house_rule.as_deref().map(|t| tag("/local_constraint/house rule", t)).transpose()?,
        cuisines: tag_set("/local_constraint/cuisine", local.cuisine, |s| vocab::cuisine(s).map(String::from))?,
        house_type: local.room_type.as_deref().map(|t| tag("/local_constraint/room type", t)).transpose()?,
        transportation: local.transportation.as_deref().map(|t| tag("/local_constraint/transportation", t)).transpose()?,
        flight_rule: local.flight_rule.as_deref().map(|t| tag("/local_constraint/flight rule", t)).transpose()?,
        airlines: tag_set("/local_constraint/airlines", local.airlines, |s| {
            let s = s.trim();
            if s.is_empty() {
                Err(vocab::UnknownTag { vocabulary: "airline", tag: s.into() })
            } else {
                Ok(s.to_string())
            }
        })?,
        attraction_category: tag_set("/local_constraint/attraction_category", local.attraction_category, |s| {
            vocab::category(s).map(String::from)
        })?,
    };
    let mut date = Vec::with_capacity(raw.date.len());
    for (i, d) in raw.date.iter().enumerate() {
        let parsed = NaiveDate::parse_from_str(d, "%Y-%m-%d")
            .map_err(|_| schema(&format!("/date/{i}"), format!("not an ISO date: {d:?}")))?;
        date.push(parsed);
    }
    let budget = match &raw.budget {
        RawAmount::Number(n) => parse_rational(&n.to_string()),
        RawAmount::Text(s) => parse_rational(s),
    }
    .map_err(|m| schema("/budget", m))?;
    let dest = match raw.dest {
        RawDest::State(s) => Destination::State(s),
        RawDest::Cities(c) => Destination::Cities(c),
    };
    let visiting_city_number = match (&dest, raw.visiting_city_number) {
        (_, Some(k)) => k,
        (Destination::Cities(c), None) => c.len(),
        (Destination::State(_), None) => return Err(schema("/visiting_city_number", "required when dest is a state")),
    };
    let q = Query {
        org: raw.org,
        dest,
        visiting_city_number,
        days: raw.days,
        date,
        people_number: raw.people_number,
        local_constraint: lc,
        budget,
        attractions_per_day: raw.attractions_per_day.unwrap_or(1),
        meals_per_day: raw.meals_per_day.unwrap_or(3),
    };
    q.validate()?;
    Ok(q)
}

impl Query {
    /// Checks every invariant; parsing and modification both end here.
    pub fn validate(&self) -> Result<(), QueryError> {
        if self.org.trim().is_empty() {
            return Err(schema("/org", "empty origin"));
        }
        if self.days == 0 {
            return Err(schema("/days", "must be positive"));
        }
        if self.date.len() != self.days {
            return Err(schema("/date", format!("expected {} dates, found {}", self.days, self.date.len())));
        }
        for i in 1..self.date.len() {
            if self.date[i - 1].succ_opt() != Some(self.date[i]) {
                return Err(schema(&format!("/date/{i}"), "dates must be consecutive"));
            }
        }
        if self.people_number == 0 {
            return Err(schema("/people_number", "must be positive"));
        }
        let k = self.visiting_city_number;
        if k == 0 {
            return Err(schema("/visiting_city_number", "must be positive"));
        }
        match &self.dest {
            Destination::Cities(list) => {
                if list.len() != k {
                    return Err(schema("/dest", format!("expected {k} cities, found {}", list.len())));
                }
                for (i, c) in list.iter().enumerate() {
                    if c.trim().is_empty() {
                        return Err(schema(&format!("/dest/{i}"), "empty city"));
                    }
                    if *c == self.org {
                        return Err(schema(&format!("/dest/{i}"), "destination equals origin"));
                    }
                    if list[..i].contains(c) {
                        return Err(schema(&format!("/dest/{i}"), "repeated destination"));
                    }
                }
            }
            Destination::State(s) => {
                if s.trim().is_empty() {
                    return Err(schema("/dest", "empty state"));
                }
            }
        }
        if self.budget < Rational::zero() {
            return Err(schema("/budget", "must not be negative"));
        }
        if self.attractions_per_day == 0 {
            return Err(schema("/attractions_per_day", "must be positive"));
        }
        if !(1..=3).contains(&self.meals_per_day) {
            return Err(schema("/meals_per_day", "must be 1, 2 or 3"));
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.visiting_city_number
    }

    pub fn to_json(&self) -> Value {
        let lc = &self.local_constraint;
        let set = |s: &Option<BTreeSet<String>>| match s {
            Some(items) => json!(items.iter().collect::<Vec<_>>()),
            None => Value::Null,
        };
        let opt = |s: Option<&str>| s.map_or(Value::Null, |t| json!(t));
        let mut local = Map::new();
        local.insert("house rule".into(), opt(lc.house_rule.map(|t| t.as_str())));
        local.insert("cuisine".into(), set(&lc.cuisines));
        local.insert("room type".into(), opt(lc.house_type.map(|t| t.as_str())));
        local.insert("transportation".into(), opt(lc.transportation.map(|t| t.as_str())));
        local.insert("flight rule".into(), opt(lc.flight_rule.map(|t| t.as_str())));
        local.insert("airlines".into(), set(&lc.airlines));
        local.insert("attraction_category".into(), set(&lc.attraction_category));

        let mut m = Map::new();
        m.insert("org".into(), json!(self.org));
        m.insert(
            "dest".into(),
            match &self.dest {
                Destination::Cities(c) => json!(c),
                Destination::State(s) => json!(s),
            },
        );
        m.insert("days".into(), json!(self.days));
        m.insert("visiting_city_number".into(), json!(self.visiting_city_number));
        m.insert(
            "date".into(),
            json!(self.date.iter().map(|d| d.format("%Y-%m-%d").to_string()).collect::<Vec<_>>()),
        );
        m.insert("people_number".into(), json!(self.people_number));
        m.insert("local_constraint".into(), Value::Object(local));
        m.insert("budget".into(), amount_to_json(&self.budget));
        m.insert("attractions_per_day".into(), json!(self.attractions_per_day));
        m.insert("meals_per_day".into(), json!(self.meals_per_day));
        Value::Object(m)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("query serializes")
    }
}

impl Serialize for Query {
    fn serialize<Z: Serializer>(&self, s: Z) -> Result<Z::Ok, Z::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Query {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        parse_query_value(&v).map_err(serde::de::Error::custom)
    }
}

/// Query fields a modification can touch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QueryField {
    Budget,
    Destinations,
    HouseType,
    Transportation,
    FlightRule,
    Airlines,
    Categories,
    Cuisines,
}

impl QueryField {
    pub const ALL: [QueryField; 8] = [
        QueryField::Budget,
        QueryField::Destinations,
        QueryField::HouseType,
        QueryField::Transportation,
        QueryField::FlightRule,
        QueryField::Airlines,
        QueryField::Categories,
        QueryField::Cuisines,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            QueryField::Budget => "budget",
            QueryField::Destinations => "destinations",
            QueryField::HouseType => "house-type",
            QueryField::Transportation => "transport",
            QueryField::FlightRule => "non-stop",
            QueryField::Airlines => "airlines",
            QueryField::Categories => "categories",
            QueryField::Cuisines => "cuisines",
        }
    }

    /// Accepts the policy spellings (`non-stop`, `transport`, ...) and the
    /// serde names.
    pub fn parse(text: &str) -> Option<Self> {
        let t = text.trim().to_ascii_lowercase().replace('_', "-");
        QueryField::ALL.into_iter().find(|f| {
            f.as_str() == t
                || serde_json::to_value(f).ok().and_then(|v| v.as_str().map(|s| s == t)).unwrap_or(false)
                || matches!((f, t.as_str()), (QueryField::Transportation, "transportation"))
                || matches!((f, t.as_str()), (QueryField::FlightRule, "flight-rule" | "nonstop"))
                || matches!((f, t.as_str()), (QueryField::Destinations, "destination" | "dest"))
                || matches!((f, t.as_str()), (QueryField::HouseType, "room-type"))
        })
    }
}

impl fmt::Display for QueryField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A single-field edit from the suggestion grammar.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum Modification {
    #[serde(with = "amount")]
    RaiseBudget(Rational),
    ChangeDestinations(Vec<String>),
    RemoveHouseType,
    RemoveTransportation,
    RemoveFlightRule,
    ChangeAirlines(BTreeSet<String>),
    ChangeCategories(BTreeSet<String>),
    ChangeCuisines(BTreeSet<String>),
}

impl Modification {
    pub fn field(&self) -> QueryField {
        match self {
            Modification::RaiseBudget(_) => QueryField::Budget,
            Modification::ChangeDestinations(_) => QueryField::Destinations,
            Modification::RemoveHouseType => QueryField::HouseType,
            Modification::RemoveTransportation => QueryField::Transportation,
            Modification::RemoveFlightRule => QueryField::FlightRule,
            Modification::ChangeAirlines(_) => QueryField::Airlines,
            Modification::ChangeCategories(_) => QueryField::Categories,
            Modification::ChangeCuisines(_) => QueryField::Cuisines,
        }
    }

    /// Parses one suggestion such as `raise budget to 5000` or
    /// `change airlines to be United, Air France, or JetBlue`.
    pub fn parse(text: &str) -> Result<Self, String> {
        let t = text.trim().trim_end_matches('.').trim();
        let lower = t.to_ascii_lowercase();
        let after = |prefixes: &[&str]| -> Option<&str> {
            prefixes.iter().find_map(|p| lower.starts_with(p).then(|| t[p.len()..].trim()))
        };
        if let Some(rest) = after(&["raise budget to ", "raise the budget to "]) {
            let cleaned: String = rest.chars().filter(|c| *c != ',' && *c != '$').collect();
            return parse_rational(&cleaned).map(Modification::RaiseBudget);
        }
        if let Some(rest) = after(&["change destination cities to be ", "change destination city to be ", "change destinations to be "]) {
            return Ok(Modification::ChangeDestinations(split_list(rest)));
        }
        if let Some(rest) = after(&["change airlines to be ", "change the airlines to be "]) {
            return Ok(Modification::ChangeAirlines(split_list(rest).into_iter().collect()));
        }
        if let Some(rest) = after(&["change attraction categories to be ", "change categories to be "]) {
            let mut out = BTreeSet::new();
            for c in split_list(rest) {
                out.insert(vocab::category(&c).map_err(|e| e.to_string())?.to_string());
            }
            return Ok(Modification::ChangeCategories(out));
        }
        if let Some(rest) = after(&["change cuisines to be ", "change cuisine types to be "]) {
            let mut out = BTreeSet::new();
            for c in split_list(rest) {
                out.insert(vocab::cuisine(&c).map_err(|e| e.to_string())?.to_string());
            }
            return Ok(Modification::ChangeCuisines(out));
        }
        if lower.starts_with("remove") {
            if lower.contains("non-stop") || lower.contains("nonstop") || lower.contains("flight rule") {
                return Ok(Modification::RemoveFlightRule);
            }
            if lower.contains("house type") || lower.contains("room type") {
                return Ok(Modification::RemoveHouseType);
            }
            if lower.contains("transportation") {
                return Ok(Modification::RemoveTransportation);
            }
        }
        Err(format!("not a recognized suggestion: {t:?}"))
    }
}

fn split_list(text: &str) -> Vec<String> {
    let mut items = Vec::new();
    if text.trim().eq_ignore_ascii_case("none") {
        return items;
    }
    for part in text.split(',') {
        let part = part.trim();
        let part = part.strip_prefix("and ").or_else(|| part.strip_prefix("or ")).unwrap_or(part);
        for piece in part.split(" and ").flat_map(|p| p.split(" or ")) {
            let piece = piece.trim();
            if !piece.is_empty() {
                items.push(piece.to_string());
            }
        }
    }
    items
}

fn join_list<'a>(items: impl IntoIterator<Item = &'a String>, last: &str) -> String {
    let items: Vec<&String> = items.into_iter().collect();
    match items.len() {
        0 => "none".into(),
        1 => items[0].clone(),
        2 => format!("{} {last} {}", items[0], items[1]),
        n => {
            let head: Vec<&str> = items[..n - 1].iter().map(|s| s.as_str()).collect();
            format!("{}, {last} {}", head.join(", "), items[n - 1])
        }
    }
}

impl fmt::Display for Modification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modification::RaiseBudget(b) => write!(f, "raise budget to {}", format_rational(b)),
            Modification::ChangeDestinations(c) => write!(f, "change destination cities to be {}", join_list(c, "and")),
            Modification::RemoveHouseType => f.write_str("remove the house type constraint"),
            Modification::RemoveTransportation => f.write_str("remove the transportation constraint"),
            Modification::RemoveFlightRule => f.write_str("remove the non-stop constraint"),
            Modification::ChangeAirlines(a) => write!(f, "change airlines to be {}", join_list(a, "or")),
            Modification::ChangeCategories(c) => write!(f, "change attraction categories to be {}", join_list(c, "and")),
            Modification::ChangeCuisines(c) => write!(f, "change cuisines to be {}", join_list(c, "and")),
        }
    }
}

/// Returns a copy of `q` with the one field `m` targets replaced. Removals
/// require the constraint to be present; set-assignments may repeat.
pub fn apply_modification(q: &Query, m: &Modification) -> Result<Query, QueryError> {
    let inapplicable = |why: &str| QueryError::Inapplicable(m.to_string(), why.into());
    let mut out = q.clone();
    let lc = &mut out.local_constraint;
    match m {
        Modification::RaiseBudget(b) => {
            if *b < q.budget {
                return Err(inapplicable("new budget is lower than the current one"));
            }
            out.budget = *b;
        }
        Modification::ChangeDestinations(cities) => {
            if cities.len() != q.k() {
                return Err(inapplicable("the number of destination cities must stay the same"));
            }
            out.dest = Destination::Cities(cities.clone());
        }
        Modification::RemoveHouseType => {
            if lc.house_type.take().is_none() {
                return Err(inapplicable("no room type constraint to remove"));
            }
        }
        Modification::RemoveTransportation => {
            if lc.transportation.take().is_none() {
                return Err(inapplicable("no transportation constraint to remove"));
            }
        }
        Modification::RemoveFlightRule => {
            if lc.flight_rule.take().is_none() {
                return Err(inapplicable("no flight rule to remove"));
            }
        }
        Modification::ChangeAirlines(a) => lc.airlines = Some(a.clone()),
        Modification::ChangeCategories(c) => {
            for tag in c {
                vocab::category(tag).map_err(|e| inapplicable(&e.to_string()))?;
            }
            lc.attraction_category = Some(c.clone());
        }
        Modification::ChangeCuisines(c) => {
            for tag in c {
                vocab::cuisine(tag).map_err(|e| inapplicable(&e.to_string()))?;
            }
            lc.cuisines = Some(c.clone());
        }
    }
    out.validate().map_err(|e| inapplicable(&e.to_string()))?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suggestion_grammar_round_trips() {
        let cases = [
            Modification::RaiseBudget(Rational::from_integer(5000)),
            Modification::ChangeDestinations(vec!["Istanbul".into(), "Macau".into()]),
            Modification::RemoveFlightRule,
            Modification::RemoveHouseType,
            Modification::RemoveTransportation,
            Modification::ChangeAirlines(["United", "Air France", "JetBlue"].map(String::from).into()),
            Modification::ChangeCategories(["Garden", "Museum"].map(String::from).into()),
            Modification::ChangeCuisines(["Chinese"].map(String::from).into()),
            Modification::ChangeCategories(BTreeSet::new()),
        ];
        for m in cases {
            assert_eq!(Modification::parse(&m.to_string()), Ok(m.clone()), "{m}");
        }
        assert_eq!(
            Modification::parse("change airlines to be United, Air France, or JetBlue"),
            Ok(Modification::ChangeAirlines(["United", "Air France", "JetBlue"].map(String::from).into()))
        );
        assert_eq!(
            Modification::parse("remove the flight/no flight/ no self-driving assertion for transportations"),
            Ok(Modification::RemoveTransportation)
        );
        assert!(Modification::parse("change origin to be Paris").is_err());
    }

    #[test]
    fn modification_json_shape() {
        let m = Modification::RaiseBudget(Rational::from_integer(5000));
        assert_eq!(serde_json::to_value(&m).unwrap(), json!({"kind": "raise-budget", "value": 5000}));
        let back: Modification = serde_json::from_value(json!({"kind": "remove-flight-rule"})).unwrap();
        assert_eq!(back, Modification::RemoveFlightRule);
    }

    #[test]
    fn field_names() {
        assert_eq!(QueryField::parse("non-stop"), Some(QueryField::FlightRule));
        assert_eq!(QueryField::parse("transport"), Some(QueryField::Transportation));
        assert_eq!(QueryField::parse("house-type"), Some(QueryField::HouseType));
        assert_eq!(QueryField::parse("origin"), None);
    }
}
