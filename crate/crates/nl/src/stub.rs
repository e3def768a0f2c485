//! Offline translation for the usual request phrasings:
//!
//! - length: `5-day`, `3 day`
//! - party: `for a group of 3`, `for 2 people`, `for me`
//! - origin: `departing from X`, `beginning in X`, `starting in X`, `from X to Y`
//! - destination: `visiting 2 cities in S`, `ending in Y`, `to Y`, `heading to Y`
//! - dates: `from March 3rd to March 7th, 2022`, `from the 8th to the 10th of March, 2022`, `on March 3rd, 2022`
//! - budget: the first `$1,100`-style amount
//! - house rule: `allow(s) parties|smoking|pets|visitors|children under 10`, `host parties`
//! - room type: `entire room(s)`, `private room(s)`, `shared room(s)`, `not/no shared room(s)`
//! - cuisines: any listed cuisine name
//! - transportation: refusals of flights or of self-driving, `only fly`
//!
//! Anything outside these forms fails instead of guessing.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use chrono::{Days, NaiveDate};
use regex::Regex;
use tripsolve::query::{Destination, LocalConstraint, Query};
use tripsolve::vocab::{HouseRule, HouseType, Transportation, CUISINES};
use tripsolve::Rational;

const MONTHS: [&str; 12] = [
    "january",
    "february",
    "march",
    "april",
    "may",
    "june",
    "july",
    "august",
    "september",
    "october",
    "november",
    "december",
];

fn re(cell: &'static OnceLock<Regex>, pattern: &str) -> &'static Regex {
    cell.get_or_init(|| Regex::new(pattern).expect("stub patterns compile"))
}

macro_rules! pattern {
    ($name:ident, $p:expr) => {
        fn $name() -> &'static Regex {
            static CELL: OnceLock<Regex> = OnceLock::new();
            re(&CELL, $p)
        }
    };
}

const CITY: &str = r"([A-Z][\w.'-]*(?:\s+[A-Z][\w.'-]*)*)";
const MONTH: &str = r"(January|February|March|April|May|June|July|August|September|October|November|December)";

pattern!(days_re, r"(?i)\b(\d+)[- ]day\b");
pattern!(group_re, r"(?i)\bgroup of (\d+|\w+)\b");
pattern!(people_re, r"(?i)\bfor (\d+|\w+) (?:people|persons|travell?ers|adults)\b");
pattern!(solo_re, r"(?i)\b(?:for me|solo|for one person|by myself)\b");
pattern!(org_re, &format!(r"\b(?:departing from|beginning in|starting in|starting from|leaving from) {CITY}"));
pattern!(state_re, &format!(r"(?i:\bvisiting) (\d+|\w+) (?i:cities|city) (?i:in) {CITY}"));
pattern!(dest_re, &format!(r"\b(?:ending in|heading to|going to|traveling to|travelling to|to visit) {CITY}"));
pattern!(from_to_re, &format!(r"\bfrom {CITY} to {CITY}"));
pattern!(range_re, &format!(r"(?i)\bfrom {MONTH} (\d{{1,2}})(?:st|nd|rd|th)? to (?:{MONTH} )?(\d{{1,2}})(?:st|nd|rd|th)?,? (\d{{4}})"));
pattern!(
    range_of_re,
    &format!(r"(?i)\bfrom the (\d{{1,2}})(?:st|nd|rd|th)? to the (\d{{1,2}})(?:st|nd|rd|th)? of {MONTH},? (\d{{4}})")
);
pattern!(single_re, &format!(r"(?i)\bon {MONTH} (\d{{1,2}})(?:st|nd|rd|th)?,? (\d{{4}})"));
pattern!(budget_re, r"\$\s?(\d[\d,]*(?:\.\d+)?)");
pattern!(rule_re, r"(?i)\b(?:allows?|permits?|host|hosting|bring|bringing) (?:for )?(parties|smoking|pets|visitors|children under 10)\b");
pattern!(room_re, r"(?i)\b(not shared|no shared|entire|private|shared) rooms?\b");
pattern!(no_flight_re, r"(?i)\b(?:don't|do not|won't|will not|never) (?:want to )?(?:take|taking|use|book) (?:any )?(?:flights?|planes?)|\bno flights?\b|\bwithout flying\b");
pattern!(no_drive_re, r"(?i)\b(?:don't|do not|won't|will not) (?:plan to |want to )?(?:self-drive|drive ourselves|drive)\b|\bno self-driving\b");
pattern!(fly_only_re, r"(?i)\bonly (?:fly|flights)\b");

fn number(word: &str) -> Option<usize> {
    if let Ok(n) = word.parse() {
        return Some(n);
    }
    let words = ["zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten"];
    words.iter().position(|w| w.eq_ignore_ascii_case(word))
}

fn month(name: &str) -> Option<u32> {
    MONTHS.iter().position(|m| m.eq_ignore_ascii_case(name)).map(|i| i as u32 + 1)
}

fn date(year: &str, month_name: &str, day: &str) -> Option<NaiveDate> {
    NaiveDate::from_ymd_opt(year.parse().ok()?, month(month_name)?, day.parse().ok()?)
}

/// First and last trip date named in `text`, if any.
fn date_range(text: &str) -> Option<(NaiveDate, Option<NaiveDate>)> {
    if let Some(c) = range_re().captures(text) {
        let start = date(&c[5], &c[1], &c[2])?;
        let end_month = c.get(3).map_or(&c[1], |m| m.as_str());
        return Some((start, Some(date(&c[5], end_month, &c[4])?)));
    }
    if let Some(c) = range_of_re().captures(text) {
        return Some((date(&c[4], &c[3], &c[1])?, Some(date(&c[4], &c[3], &c[2])?)));
    }
    let c = single_re().captures(text)?;
    Some((date(&c[3], &c[1], &c[2])?, None))
}

fn trim_city(city: &str) -> String {
    city.trim().trim_end_matches(['.', ',']).to_string()
}

/// Applies the pattern grammar; the error lists what could not be read.
pub fn stub_translate(text: &str) -> Result<Query, String> {
    let mut missing = Vec::new();
    let days = days_re().captures(text).and_then(|c| c[1].parse::<usize>().ok());
    let people = group_re()
        .captures(text)
        .or_else(|| people_re().captures(text))
        .and_then(|c| number(&c[1]))
        .or_else(|| solo_re().is_match(text).then_some(1));
    let from_to = from_to_re().captures(text);
    let org = org_re()
        .captures(text)
        .map(|c| trim_city(&c[1]))
        .or_else(|| from_to.as_ref().map(|c| trim_city(&c[1])));
    let (dest, k) = if let Some(c) = state_re().captures(text) {
        (Some(Destination::State(trim_city(&c[2]))), number(&c[1]))
    } else if let Some(c) = dest_re().captures(text) {
        (Some(Destination::Cities(vec![trim_city(&c[1])])), Some(1))
    } else if let Some(c) = &from_to {
        (Some(Destination::Cities(vec![trim_city(&c[2])])), Some(1))
    } else {
        (None, None)
    };
    let dates = date_range(text);
    let budget = budget_re().captures(text).map(|c| c[1].replace(',', ""));

    for (name, ok) in [
        ("length", days.is_some()),
        ("party size", people.is_some()),
        ("origin", org.is_some()),
        ("destination", dest.is_some() && k.is_some()),
        ("dates", dates.is_some()),
        ("budget", budget.is_some()),
    ] {
        if !ok {
            missing.push(name);
        }
    }
    if !missing.is_empty() {
        return Err(format!("could not read {}", missing.join(", ")));
    }
    let (days, people, org, dest, k) = (days.unwrap(), people.unwrap(), org.unwrap(), dest.unwrap(), k.unwrap());
    let (start, end) = dates.unwrap();
    if let Some(end) = end {
        let span = (end - start).num_days() + 1;
        if span != days as i64 {
            return Err(format!("a {days}-day trip does not fit {start} to {end}"));
        }
    }
    let budget = tripsolve::num::parse_rational(&budget.unwrap())?;

    let mut lc = LocalConstraint::default();
    if let Some(c) = rule_re().captures(text) {
        lc.house_rule = Some(c[1].parse::<HouseRule>().map_err(|e| e.to_string())?);
    }
    if let Some(c) = room_re().captures(text) {
        let t = match c[1].to_ascii_lowercase().as_str() {
            "entire" => HouseType::EntireRoom,
            "private" => HouseType::PrivateRoom,
            "shared" => HouseType::SharedRoom,
            _ => HouseType::NotSharedRoom,
        };
        lc.house_type = Some(t);
    }
    let cuisines: BTreeSet<String> = CUISINES
        .iter()
        .filter(|c| Regex::new(&format!(r"\b{c}\b")).is_ok_and(|r| r.is_match(text)))
        .map(|c| c.to_string())
        .collect();
    if !cuisines.is_empty() {
        lc.cuisines = Some(cuisines);
    }
    lc.transportation = if no_flight_re().is_match(text) {
        Some(Transportation::NoFlight)
    } else if no_drive_re().is_match(text) {
        Some(Transportation::NoSelfDriving)
    } else if fly_only_re().is_match(text) {
        Some(Transportation::Flight)
    } else {
        None
    };

    let date: Vec<NaiveDate> = (0..days as u64).map(|d| start + Days::new(d)).collect();
    let q = Query {
        org,
        dest,
        visiting_city_number: k,
        days,
        date,
        people_number: people as u32,
        local_constraint: lc,
        budget: budget.max(Rational::from_integer(0)),
        attractions_per_day: 1,
        meals_per_day: 3,
    };
    q.validate().map_err(|e| e.to_string())?;
    Ok(q)
}
