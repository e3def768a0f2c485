//! Assertion labels. Cores are sets of these strings, so diagnosis parses
//! them back with [`classify`].

use crate::vocab::{HouseRule, HouseType};

pub const CITY: &str = "visit city in cities list";
pub const START_DATE: &str = "travel start date";
pub const END_DATE: &str = "travel end date";
pub const VALID_DATE: &str = "valid travel date";
pub const NO_DRIVE_IF_FLIGHT: &str = "no self-driving if taken flight";
pub const NO_DRIVE_IF_TAXI: &str = "no self-driving if taken taxi";
pub const VALID_RESTAURANT: &str = "valid restaurant index";
pub const NON_REPEATING_RESTAURANT: &str = "non repeating restaurant index";
pub const ATTRACTION_CITY: &str = "attraction in which city";
pub const VALID_ATTRACTION: &str = "valid attraction index";
pub const NON_REPEATING_ATTRACTION: &str = "non repeating attraction index";
pub const VALID_ACCOMMODATION: &str = "valid accommodation index";
pub const MINIMUM_NIGHTS: &str = "minimum nights satisfied";
pub const BUDGET: &str = "budget enough";

pub fn one_method(leg: usize) -> String {
    format!("either flight, self-driving, or taxi for transportation {leg}")
}

pub fn no_flight(leg: usize) -> String {
    format!("no flight for transportation {leg}")
}

pub fn no_self_driving(leg: usize) -> String {
    format!("no self-driving for transportation {leg}")
}

pub fn no_taxi(leg: usize) -> String {
    format!("no taxi for transportation {leg}")
}

pub fn valid_flight(leg: usize) -> String {
    format!("valid flight index for flight {leg}")
}

pub fn non_stop(leg: usize) -> String {
    format!("non-stop flight {leg}")
}

pub fn airline(leg: usize) -> String {
    format!("allowed airline flight {leg}")
}

pub fn driving_possible(leg: usize) -> String {
    format!("driving is possible for transportation {leg}")
}

/// `b`, `l` or `d`.
pub fn meal_city(letter: char) -> String {
    format!("eat in which city {letter}")
}

pub fn cuisine(tag: &str) -> String {
    format!("{tag} type restaurant is visited")
}

pub fn category(tag: &str) -> String {
    format!("{tag} category attraction is visited")
}

pub fn room_type(t: HouseType) -> String {
    format!("{} types accommodation visited", t.as_str())
}

pub fn house_rule(r: HouseRule) -> String {
    format!("{} rules accommodation not visited", r.prohibition())
}

/// Parsed form of a label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LabelKind {
    City,
    StartDate,
    EndDate,
    ValidDate,
    OneMethod(usize),
    NoDriveIfFlight,
    NoDriveIfTaxi,
    NoFlight(usize),
    NoSelfDriving(usize),
    NoTaxi(usize),
    ValidFlight(usize),
    NonStop(usize),
    Airline(usize),
    DrivingPossible(usize),
    MealCity(char),
    ValidRestaurant,
    NonRepeatingRestaurant,
    Cuisine(String),
    AttractionCity,
    ValidAttraction,
    NonRepeatingAttraction,
    Category(String),
    ValidAccommodation,
    MinimumNights,
    RoomType(String),
    HouseRule(String),
    Budget,
}

fn leg_suffix(label: &str, prefix: &str) -> Option<usize> {
    label.strip_prefix(prefix)?.parse().ok()
}

/// Inverse of the label constructors; `None` for anything else.
pub fn classify(label: &str) -> Option<LabelKind> {
    use LabelKind::*;
    let fixed = [
        (CITY, City),
        (START_DATE, StartDate),
        (END_DATE, EndDate),
        (VALID_DATE, ValidDate),
        (NO_DRIVE_IF_FLIGHT, NoDriveIfFlight),
        (NO_DRIVE_IF_TAXI, NoDriveIfTaxi),
        (VALID_RESTAURANT, ValidRestaurant),
        (NON_REPEATING_RESTAURANT, NonRepeatingRestaurant),
        (ATTRACTION_CITY, AttractionCity),
        (VALID_ATTRACTION, ValidAttraction),
        (NON_REPEATING_ATTRACTION, NonRepeatingAttraction),
        (VALID_ACCOMMODATION, ValidAccommodation),
        (MINIMUM_NIGHTS, MinimumNights),
        (BUDGET, Budget),
    ];
    if let Some((_, kind)) = fixed.iter().find(|(text, _)| *text == label) {
        return Some(kind.clone());
    }
    let legs: [(&str, fn(usize) -> LabelKind); 8] = [
        ("either flight, self-driving, or taxi for transportation ", OneMethod),
        ("no flight for transportation ", NoFlight),
        ("no self-driving for transportation ", NoSelfDriving),
        ("no taxi for transportation ", NoTaxi),
        ("valid flight index for flight ", ValidFlight),
        ("non-stop flight ", NonStop),
        ("allowed airline flight ", Airline),
        ("driving is possible for transportation ", DrivingPossible),
    ];
    for (prefix, make) in legs {
        if let Some(i) = leg_suffix(label, prefix) {
            return Some(make(i));
        }
    }
    if let Some(rest) = label.strip_prefix("eat in which city ") {
        let mut chars = rest.chars();
        if let (Some(c @ ('b' | 'l' | 'd')), None) = (chars.next(), chars.next()) {
            return Some(MealCity(c));
        }
    }
    if let Some(tag) = label.strip_suffix(" type restaurant is visited") {
        return Some(Cuisine(tag.to_string()));
    }
    if let Some(tag) = label.strip_suffix(" category attraction is visited") {
        return Some(Category(tag.to_string()));
    }
    if let Some(tag) = label.strip_suffix(" types accommodation visited") {
        return Some(RoomType(tag.to_string()));
    }
    if let Some(tag) = label.strip_suffix(" rules accommodation not visited") {
        return Some(HouseRule(tag.to_string()));
    }
    None
}
