mod common;

use common::breakfast_fixture;
use proptest::prelude::*;
use tripsolve::encoder::{solve_query, EncodingParams, PlanOutcome, SolveLimits};
use tripsolve::num::{format_rational, parse_rational};
use tripsolve::Rational;

/// Vehicles needed for `people` when each holds `seats`, by filling them one
/// at a time.
fn vehicles(people: u32, seats: u32) -> i64 {
    let (mut left, mut n) = (people as i64, 0);
    while left > 0 {
        left -= seats as i64;
        n += 1;
    }
    n
}

#[test]
fn unit_values() {
    let p = EncodingParams::default();
    assert_eq!(p.taxi_cost(&Rational::from_integer(1821), 3), Rational::from_integer(1821));
    assert_eq!(p.self_driving_cost(&Rational::from_integer(100), 5), Rational::from_integer(5));
    assert_eq!(p.self_driving_cost(&Rational::from_integer(100), 6), Rational::from_integer(10));
    assert_eq!(p.taxi_cost(&Rational::from_integer(10), 5), Rational::from_integer(20));
    assert_eq!(p.rooms(5, 2), 3);
    assert_eq!(p.rooms(4, 2), 2);
}

fn first_breakfast(arrive: i64) -> String {
    let (db, q) = breakfast_fixture(arrive);
    let out = solve_query(&q, &db, &EncodingParams::default(), &SolveLimits::default()).unwrap();
    let PlanOutcome::Delivered(d) = out else { panic!("fixture has a plan") };
    d.plan.days[0].breakfast.clone()
}

#[test]
fn early_arrival_eats_breakfast_away() {
    assert!(first_breakfast(3).ends_with(", Away"));
}

#[test]
fn late_arrival_skips_breakfast_away() {
    assert_eq!(first_breakfast(11), "-");
}

proptest! {
    #[test]
    fn taxi_and_drive_match_vehicle_count(km in 1i64..5000, people in 1u32..20) {
        let p = EncodingParams::default();
        let d = Rational::from_integer(km);
        prop_assert_eq!(p.taxi_cost(&d, people), d * Rational::from_integer(vehicles(people, 4)));
        prop_assert_eq!(p.self_driving_cost(&d, people), d * Rational::new(vehicles(people, 5), 20));
    }

    #[test]
    fn rooms_cover_everyone(people in 1u32..30, occ in 1u32..8) {
        let rooms = EncodingParams::default().rooms(people, occ);
        prop_assert!(rooms * occ as i64 >= people as i64);
        prop_assert!((rooms - 1) * (occ as i64) < people as i64);
    }

    #[test]
    fn amounts_round_trip(n in -1_000_000i64..1_000_000, d in 1i64..2000) {
        let r = Rational::new(n, d);
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }
}
