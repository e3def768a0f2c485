mod common;

use common::oracle_case;
use tripsolve::encoder::{solve_query, EncodingParams, PlanOutcome, SolveLimits};
use tripsolve::plan::{undelivered, verify, Plan, COMMONSENSE_CHECKS};
use tripsolve::query::Query;
use tripsolve::data::Database;

fn delivered_cases(count: usize) -> Vec<(Database, Query, Plan)> {
    let params = EncodingParams::default();
    let limits = SolveLimits { core_minimization: None, ..SolveLimits::default() };
    (0..200)
        .filter_map(|i| {
            let c = oracle_case(5, i);
            match solve_query(&c.query, &c.db, &params, &limits).unwrap() {
                PlanOutcome::Delivered(d) => Some((c.db, c.query, d.plan)),
                _ => None,
            }
        })
        .take(count)
        .collect()
}

fn failures_after(db: &Database, q: &Query, plan: &Plan) -> Vec<String> {
    verify(plan, q, db, &EncodingParams::default()).failures().into_iter().map(String::from).collect()
}

#[test]
fn solver_plans_pass_everything() {
    let cases = delivered_cases(10);
    assert!(cases.len() >= 5);
    for (db, q, plan) in &cases {
        assert!(failures_after(db, q, plan).is_empty());
        let json = plan.to_json();
        assert_eq!(&Plan::from_json(&json).unwrap(), plan);
    }
}

#[test]
fn unknown_restaurant_leaves_the_sandbox() {
    for (db, q, mut plan) in delivered_cases(5) {
        let Some(day) = plan.days.iter_mut().find(|d| d.dinner != "-") else { continue };
        let city = day.dinner.rsplit_once(", ").unwrap().1.to_string();
        day.dinner = format!("Nowhere Grill, {city}");
        assert!(failures_after(&db, &q, &plan).contains(&"within-sandbox".to_string()));
    }
}

#[test]
fn repeated_restaurant_is_caught() {
    for (db, q, mut plan) in delivered_cases(10) {
        let eaten: Vec<(usize, String)> = plan
            .days
            .iter()
            .enumerate()
            .flat_map(|(i, d)| [&d.breakfast, &d.lunch, &d.dinner].into_iter().map(move |m| (i, m.clone())))
            .filter(|(_, m)| m != "-")
            .collect();
        if eaten.len() < 2 {
            continue;
        }
        let (first, last) = (&eaten[0], eaten.last().unwrap());
        if first.1.rsplit_once(", ").unwrap().1 != last.1.rsplit_once(", ").unwrap().1 {
            continue;
        }
        let day = &mut plan.days[last.0];
        for m in [&mut day.breakfast, &mut day.lunch, &mut day.dinner] {
            if *m == last.1 {
                *m = first.1.clone();
            }
        }
        assert!(failures_after(&db, &q, &plan).contains(&"no-repeated-restaurants".to_string()));
    }
}

#[test]
fn dropped_day_is_incomplete() {
    for (db, q, mut plan) in delivered_cases(3) {
        plan.days.pop();
        assert!(failures_after(&db, &q, &plan).contains(&"complete".to_string()));
    }
}

#[test]
fn tighter_budget_fails_the_budget_check() {
    for (db, mut q, plan) in delivered_cases(5) {
        let cost = verify(&plan, &q, &db, &EncodingParams::default()).total_cost;
        q.budget = cost - tripsolve::Rational::new(1, 100);
        assert_eq!(failures_after(&db, &q, &plan), vec!["budget".to_string()]);
    }
}

#[test]
fn undelivered_fails_every_check() {
    let c = oracle_case(5, 0);
    let r = undelivered(&c.query);
    assert_eq!(r.commonsense.len(), COMMONSENSE_CHECKS.len());
    assert!(r.commonsense.iter().chain(&r.hard).all(|c| !c.passed));
}
