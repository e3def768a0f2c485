use std::collections::BTreeSet;

use chrono::{Days, NaiveDate};
use proptest::prelude::*;
use tripsolve::query::{parse_query, parse_query_value, Destination, LocalConstraint, Modification, Query};
use tripsolve::vocab::{FlightRule, HouseRule, HouseType, Transportation, CATEGORIES, CUISINES};
use tripsolve::Rational;

fn subset(pool: &'static [&'static str]) -> impl Strategy<Value = BTreeSet<String>> {
    proptest::sample::subsequence(pool.to_vec(), 1..=3).prop_map(|v| v.into_iter().map(String::from).collect())
}

fn city() -> impl Strategy<Value = String> {
    "[A-Z][a-z]{2,8}( [A-Z][a-z]{2,6})?"
}

fn local() -> impl Strategy<Value = LocalConstraint> {
    (
        proptest::option::of(proptest::sample::select(HouseRule::ALL.to_vec())),
        proptest::option::of(subset(&CUISINES)),
        proptest::option::of(proptest::sample::select(HouseType::ALL.to_vec())),
        proptest::option::of(proptest::sample::select(Transportation::ALL.to_vec())),
        proptest::option::of(Just(FlightRule::NonStop)),
        proptest::option::of(subset(&["United", "Delta", "JetBlue"])),
        proptest::option::of(subset(&CATEGORIES)),
    )
        .prop_map(|(house_rule, cuisines, house_type, transportation, flight_rule, airlines, attraction_category)| {
            LocalConstraint { house_rule, cuisines, house_type, transportation, flight_rule, airlines, attraction_category }
        })
}

fn query() -> impl Strategy<Value = Query> {
    (
        city(),
        prop_oneof![proptest::collection::vec(city(), 1..=3).prop_map(Destination::Cities), city().prop_map(Destination::State)],
        prop_oneof![Just(3usize), Just(5), Just(7)],
        0u64..300,
        1u32..=8,
        local(),
        (0i64..2_000_000, 1i64..=100),
        1usize..=3,
        1usize..=3,
    )
        .prop_map(|(org, dest, days, offset, people, lc, (n, d), attractions, meals)| {
            let k = match &dest {
                Destination::Cities(c) => c.len(),
                Destination::State(_) => 1 + (days / 3).min(2),
            };
            let start = NaiveDate::from_ymd_opt(2022, 1, 1).unwrap() + Days::new(offset);
            Query {
                org,
                dest,
                visiting_city_number: k,
                days,
                date: (0..days as u64).map(|i| start + Days::new(i)).collect(),
                people_number: people,
                local_constraint: lc,
                budget: Rational::new(n, d),
                attractions_per_day: attractions,
                meals_per_day: meals,
            }
        })
}

fn modification() -> impl Strategy<Value = Modification> {
    prop_oneof![
        (0i64..10_000_000).prop_map(|c| Modification::RaiseBudget(Rational::new(c, 100))),
        proptest::collection::vec(city(), 1..=3).prop_map(Modification::ChangeDestinations),
        Just(Modification::RemoveHouseType),
        Just(Modification::RemoveTransportation),
        Just(Modification::RemoveFlightRule),
        subset(&["United", "Air France", "JetBlue"]).prop_map(Modification::ChangeAirlines),
        subset(&CATEGORIES).prop_map(Modification::ChangeCategories),
        subset(&CUISINES).prop_map(Modification::ChangeCuisines),
    ]
}

proptest! {
    #[test]
    fn json_round_trip(q in query()) {
        prop_assume!(q.validate().is_ok());
        prop_assert_eq!(parse_query_value(&q.to_json()).unwrap(), q.clone());
        prop_assert_eq!(parse_query(&q.to_json_string()).unwrap(), q);
    }

    #[test]
    fn suggestion_text_round_trip(m in modification()) {
        prop_assert_eq!(Modification::parse(&m.to_string()).unwrap(), m);
    }
}

#[test]
fn bad_documents_point_at_the_field() {
    let err = parse_query(r#"{"org": "A"}"#).unwrap_err();
    assert!(err.pointer().is_some());
    assert!(parse_query("{").is_err());
}
