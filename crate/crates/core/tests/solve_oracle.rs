mod common;

use common::{oracle_case, Oracle};
use tripsolve::encoder::{solve_query, EncodingParams, PlanOutcome, SolveLimits};

#[test]
fn optimal_cost_matches_exhaustive_minimum() {
    let params = EncodingParams::default();
    let limits = SolveLimits { optimal: true, core_minimization: None, ..SolveLimits::default() };
    let mut delivered = 0;
    for i in 0..40 {
        let case = oracle_case(11, i);
        let oracle = Oracle { q: &case.query, db: &case.db, p: &params };
        let outcome = solve_query(&case.query, &case.db, &params, &limits).unwrap();
        match outcome {
            PlanOutcome::Delivered(d) => {
                delivered += 1;
                assert!(oracle.feasible(), "case {i}: solver delivered, oracle found nothing");
                assert_eq!(Some(d.cost), case.min_cost, "case {i}: optimum differs");
            }
            PlanOutcome::Infeasible(_) => assert!(!oracle.feasible(), "case {i}: oracle found {:?}", case.min_cost),
            PlanOutcome::Timeout(_) => panic!("case {i} timed out"),
        }
    }
    assert!(delivered > 5, "only {delivered} delivered cases");
}
