use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::encoder::labels::{classify, LabelKind};
use crate::encoder::TupleCore;

/// Reason families, declared in diagnosis priority order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    FlightAvailability,
    DrivingAvailability,
    NonStop,
    Airline,
    TransportMethod,
    Category,
    Cuisine,
    HouseType,
    HouseRule,
    MinimumNights,
    Budget,
    Dates,
    Other,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::FlightAvailability => "flight-availability",
            Family::DrivingAvailability => "driving-availability",
            Family::TransportMethod => "transport-method",
            Family::NonStop => "non-stop",
            Family::Airline => "airline",
            Family::Category => "category",
            Family::Cuisine => "cuisine",
            Family::HouseType => "house-type",
            Family::HouseRule => "house-rule",
            Family::MinimumNights => "minimum-nights",
            Family::Budget => "budget",
            Family::Dates => "dates",
            Family::Other => "other",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "kebab-case")]
pub enum Context {
    Leg(usize),
    Tag(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reason {
    pub label: String,
    pub family: Family,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub context: Option<Context>,
    pub text: String,
    /// Number of tuple cores this reason appears in.
    pub frequency: usize,
}

/// Family and context of one core label. Total: unknown labels map to
/// [`Family::Other`] with the label as tag.
pub fn family_of(label: &str) -> (Family, Option<Context>) {
    use LabelKind as K;
    let leg = |f, i| (f, Some(Context::Leg(i)));
    let tag = |f, t: String| (f, Some(Context::Tag(t)));
    match classify(label) {
        Some(K::Budget) => (Family::Budget, None),
        Some(K::ValidFlight(i)) => leg(Family::FlightAvailability, i),
        Some(K::DrivingPossible(i)) => leg(Family::DrivingAvailability, i),
        Some(K::NoFlight(i) | K::NoSelfDriving(i) | K::NoTaxi(i) | K::OneMethod(i)) => leg(Family::TransportMethod, i),
        Some(K::NoDriveIfFlight | K::NoDriveIfTaxi) => (Family::TransportMethod, None),
        Some(K::NonStop(i)) => leg(Family::NonStop, i),
        Some(K::Airline(i)) => leg(Family::Airline, i),
        Some(K::Category(t)) => tag(Family::Category, t),
        Some(K::Cuisine(t)) => tag(Family::Cuisine, t),
        Some(K::RoomType(t)) => tag(Family::HouseType, t),
        Some(K::HouseRule(t)) => tag(Family::HouseRule, t),
        Some(K::MinimumNights) => (Family::MinimumNights, None),
        Some(K::StartDate | K::EndDate | K::ValidDate) => (Family::Dates, None),
        Some(K::MealCity(c)) => tag(Family::Other, format!("meal {c}")),
        Some(K::City) => (Family::Other, None),
        Some(
            K::ValidRestaurant
            | K::NonRepeatingRestaurant
            | K::AttractionCity
            | K::ValidAttraction
            | K::NonRepeatingAttraction
            | K::ValidAccommodation,
        ) => tag(Family::Other, label.to_string()),
        None => tag(Family::Other, label.to_string()),
    }
}

fn render(family: Family, context: &Option<Context>, label: &str) -> String {
    let leg = match context {
        Some(Context::Leg(i)) => format!("transportation {i}"),
        _ => "some transportation".into(),
    };
    let tag = match context {
        Some(Context::Tag(t)) => t.as_str(),
        _ => "",
    };
    match family {
        Family::Budget => "the budget cannot cover any itinerary".into(),
        Family::FlightAvailability => format!("no usable flight for {leg}"),
        Family::DrivingAvailability => format!("no road route for {leg}"),
        Family::TransportMethod => match context {
            Some(_) => format!("the transportation constraint leaves no usable method for {leg}"),
            None => "self-driving cannot be mixed with flights or taxis".into(),
        },
        Family::NonStop => format!("no non-stop flight for {leg}"),
        Family::Airline => format!("no flight of the allowed airlines for {leg}"),
        Family::Category => format!("no attraction of category {tag} at the destinations"),
        Family::Cuisine => format!("no {tag} restaurant at the destinations"),
        Family::HouseType => format!("no {tag} accommodation at some destination"),
        Family::HouseRule => format!("every accommodation at some destination has the rule {tag}"),
        Family::MinimumNights => "the stays are shorter than the accommodations' minimum nights".into(),
        Family::Dates => "the visits do not fit in the travel dates".into(),
        Family::Other => format!("constraint \"{label}\" cannot be met"),
    }
}

/// Reasons from per-tuple cores, one per (family, context), most frequent
/// first and then by family priority.
pub fn diagnose(cores: &[TupleCore]) -> Vec<Reason> {
    let mut seen: BTreeMap<(Family, Option<Context>), (String, usize)> = BTreeMap::new();
    for core in cores {
        let mut in_this: BTreeMap<(Family, Option<Context>), String> = BTreeMap::new();
        for label in &core.core {
            in_this.entry(family_of(label)).or_insert_with(|| label.clone());
        }
        for (key, label) in in_this {
            seen.entry(key).or_insert((label, 0)).1 += 1;
        }
    }
    let mut out: Vec<Reason> = seen
        .into_iter()
        .map(|((family, context), (label, frequency))| Reason {
            text: render(family, &context, &label),
            label,
            family,
            context,
            frequency,
        })
        .collect();
    out.sort_by(|a, b| b.frequency.cmp(&a.frequency).then(a.family.cmp(&b.family)).then(a.context.cmp(&b.context)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::labels;

    fn core(labels: &[&str]) -> TupleCore {
        TupleCore { tuple: vec!["X".into()], core: labels.iter().map(|s| s.to_string()).collect(), minimal: true }
    }

    #[test]
    fn flight_label_maps_to_leg() {
        let r = diagnose(&[core(&[&labels::valid_flight(0)])]);
        assert_eq!(r[0].family, Family::FlightAvailability);
        assert_eq!(r[0].context, Some(Context::Leg(0)));
        assert_eq!(r[0].text, "no usable flight for transportation 0");
    }

    #[test]
    fn frequency_then_priority() {
        let r = diagnose(&[
            core(&[labels::BUDGET, &labels::non_stop(1)]),
            core(&[labels::BUDGET, &labels::category("Park")]),
        ]);
        assert_eq!(r[0].family, Family::Budget);
        assert_eq!(r[0].frequency, 2);
        assert_eq!(r[1].family, Family::NonStop);
        assert_eq!(r[2].family, Family::Category);
    }

    #[test]
    fn unknown_label_is_kept() {
        let r = diagnose(&[core(&["mystery"])]);
        assert_eq!(r[0].family, Family::Other);
        assert_eq!(r[0].context, Some(Context::Tag("mystery".into())));
    }
}
