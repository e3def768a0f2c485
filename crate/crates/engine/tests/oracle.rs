//! Random small programs checked against exhaustive enumeration.
//!
//! The generator builds its own expression tree with its own evaluator, so
//! the reference semantics here do not share code with the engine.

use std::collections::BTreeSet;
use std::time::Duration;

use num_rational::Ratio;
use proptest::prelude::*;
use tripsolve_engine::{check, minimize_core, CheckOptions, ConstraintProgram, SolveResult, Term, VarId};

type Q = Ratio<i64>;

#[derive(Debug, Clone)]
enum N {
    Var(usize),
    Const(i64, i64),
    Add(Vec<N>),
    Sub(Box<N>, Box<N>),
    Neg(Box<N>),
    Scale(i64, Box<N>),
    Ite(Box<B>, Box<N>, Box<N>),
    Elem(Vec<i64>, Box<N>),
}

#[derive(Debug, Clone)]
enum B {
    Flag(usize),
    Lit(bool),
    Cmp(u8, N, N),
    Not(Box<B>),
    And(Vec<B>),
    Or(Vec<B>),
    Implies(Box<B>, Box<B>),
}

/// `Err(())` is an evaluation error (element out of range).
fn eval_n(n: &N, env: &[i64]) -> Result<Q, ()> {
    Ok(match n {
        N::Var(i) => Q::from_integer(env[*i]),
        N::Const(a, b) => Q::new(*a, *b),
        N::Add(items) => {
            let mut s = Q::from_integer(0);
            for it in items {
                s += eval_n(it, env)?;
            }
            s
        }
        N::Sub(a, b) => eval_n(a, env)? - eval_n(b, env)?,
        N::Neg(a) => -eval_n(a, env)?,
        N::Scale(c, a) => Q::from_integer(*c) * eval_n(a, env)?,
        N::Ite(c, a, b) => {
            if eval_b(c, env)? {
                eval_n(a, env)?
            } else {
                eval_n(b, env)?
            }
        }
        N::Elem(table, i) => {
            let i = eval_n(i, env)?;
            if !i.is_integer() {
                return Err(());
            }
            let k = i.to_integer();
            if k < 0 || k as usize >= table.len() {
                return Err(());
            }
            Q::from_integer(table[k as usize])
        }
    })
}

fn eval_b(b: &B, env: &[i64]) -> Result<bool, ()> {
    Ok(match b {
        B::Flag(i) => env[*i] != 0,
        B::Lit(v) => *v,
        B::Cmp(op, x, y) => {
            let (x, y) = (eval_n(x, env)?, eval_n(y, env)?);
            match op {
                0 => x == y,
                1 => x != y,
                2 => x < y,
                3 => x <= y,
                4 => x > y,
                _ => x >= y,
            }
        }
        B::Not(a) => !eval_b(a, env)?,
        B::And(items) => {
            let rs: Vec<_> = items.iter().map(|i| eval_b(i, env)).collect();
            if rs.contains(&Ok(false)) {
                false
            } else if rs.iter().any(|r| r.is_err()) {
                return Err(());
            } else {
                true
            }
        }
        B::Or(items) => {
            let rs: Vec<_> = items.iter().map(|i| eval_b(i, env)).collect();
            if rs.contains(&Ok(true)) {
                true
            } else if rs.iter().any(|r| r.is_err()) {
                return Err(());
            } else {
                false
            }
        }
        B::Implies(a, c) => {
            let (a, c) = (eval_b(a, env), eval_b(c, env));
            if a == Ok(false) || c == Ok(true) {
                true
            } else if a.is_err() || c.is_err() {
                return Err(());
            } else {
                false
            }
        }
    })
}

fn to_n(n: &N) -> Term<Q> {
    match n {
        N::Var(i) => Term::var(VarId(*i)),
        N::Const(a, b) => Term::constant(Q::new(*a, *b)),
        N::Add(items) => Term::sum(items.iter().map(to_n)),
        N::Sub(a, b) => to_n(a).minus(to_n(b)),
        N::Neg(a) => to_n(a).negate(),
        N::Scale(c, a) => to_n(a).times(Q::from_integer(*c)),
        N::Ite(c, a, b) => Term::ite(to_b(c), to_n(a), to_n(b)),
        N::Elem(t, i) => Term::element(t.iter().map(|v| Q::from_integer(*v)).collect::<Vec<_>>(), to_n(i)),
    }
}

fn to_b(b: &B) -> Term<Q> {
    match b {
        B::Flag(i) => Term::var(VarId(*i)),
        B::Lit(v) => Term::Bool(*v),
        B::Cmp(op, x, y) => {
            let (x, y) = (to_n(x), to_n(y));
            match op {
                0 => x.equals(y),
                1 => x.differs(y),
                2 => x.less_than(y),
                3 => x.at_most(y),
                4 => x.greater_than(y),
                _ => x.at_least(y),
            }
        }
        B::Not(a) => to_b(a).not(),
        B::And(items) => Term::all(items.iter().map(to_b)),
        B::Or(items) => Term::any(items.iter().map(to_b)),
        B::Implies(a, c) => to_b(a).implies(to_b(c)),
    }
}

#[derive(Debug, Clone)]
struct Case {
    /// (lo, hi, is_flag)
    vars: Vec<(i64, i64, bool)>,
    assertions: Vec<(String, B)>,
    objective: Option<(bool, N)>,
}

/// Numeric terms are restricted to integer-valued forms where used as
/// element indices.
fn int_term(ints: Vec<usize>) -> impl Strategy<Value = N> {
    let leaf = prop_oneof![
        proptest::sample::select(ints).prop_map(N::Var),
        (-3i64..6).prop_map(|c| N::Const(c, 1)),
    ];
    leaf.prop_recursive(2, 8, 3, |inner| {
        prop_oneof![
            proptest::collection::vec(inner.clone(), 1..3).prop_map(N::Add),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| N::Sub(Box::new(a), Box::new(b))),
            (-2i64..3, inner.clone()).prop_map(|(c, a)| N::Scale(c, Box::new(a))),
            (proptest::collection::vec(-4i64..10, 1..5), inner).prop_map(|(t, i)| N::Elem(t, Box::new(i))),
        ]
    })
}

fn num_term(ints: Vec<usize>, flags: Vec<usize>) -> impl Strategy<Value = N> {
    let ints2 = ints.clone();
    let leaf = prop_oneof![
        int_term(ints.clone()),
        (-6i64..6, 1i64..4).prop_map(|(a, b)| N::Const(a, b)),
    ];
    leaf.prop_recursive(2, 10, 3, move |inner| {
        let cond = bool_leaf(ints2.clone(), flags.clone());
        prop_oneof![
            proptest::collection::vec(inner.clone(), 1..4).prop_map(N::Add),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| N::Sub(Box::new(a), Box::new(b))),
            inner.clone().prop_map(|a| N::Neg(Box::new(a))),
            (-3i64..4, inner.clone()).prop_map(|(c, a)| N::Scale(c, Box::new(a))),
            (cond, inner.clone(), inner).prop_map(|(c, a, b)| N::Ite(Box::new(c), Box::new(a), Box::new(b))),
        ]
    })
}

fn bool_leaf(ints: Vec<usize>, flags: Vec<usize>) -> BoxedStrategy<B> {
    let cmp = (0u8..6, int_term(ints.clone()), int_term(ints)).prop_map(|(o, a, b)| B::Cmp(o, a, b));
    if flags.is_empty() {
        prop_oneof![4 => cmp, 1 => any::<bool>().prop_map(B::Lit)].boxed()
    } else {
        prop_oneof![4 => cmp, 2 => proptest::sample::select(flags).prop_map(B::Flag), 1 => any::<bool>().prop_map(B::Lit)].boxed()
    }
}

fn formula(ints: Vec<usize>, flags: Vec<usize>) -> impl Strategy<Value = B> {
    let cmp = (0u8..6, num_term(ints.clone(), flags.clone()), num_term(ints.clone(), flags.clone()))
        .prop_map(|(o, a, b)| B::Cmp(o, a, b));
    let leaf = prop_oneof![3 => cmp, 2 => bool_leaf(ints, flags)];
    leaf.prop_recursive(2, 12, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| B::Not(Box::new(a))),
            proptest::collection::vec(inner.clone(), 1..4).prop_map(B::And),
            proptest::collection::vec(inner.clone(), 1..4).prop_map(B::Or),
            (inner.clone(), inner).prop_map(|(a, b)| B::Implies(Box::new(a), Box::new(b))),
        ]
    })
}

fn case(with_objective: bool) -> impl Strategy<Value = Case> {
    proptest::collection::vec((-3i64..3, 0i64..8, prop::bool::weighted(0.25)), 1..=6)
        .prop_flat_map(move |raw| {
            let vars: Vec<(i64, i64, bool)> = raw
                .into_iter()
                .map(|(lo, w, flag)| if flag { (0, 1, true) } else { (lo, lo + w, false) })
                .collect();
            let ints: Vec<usize> = (0..vars.len()).filter(|&i| !vars[i].2).collect();
            let flags: Vec<usize> = (0..vars.len()).filter(|&i| vars[i].2).collect();
            // every generated term needs at least one integer variable
            let ints = if ints.is_empty() { vec![] } else { ints };
            let vars2 = vars.clone();
            let has_ints = !ints.is_empty();
            let (ints_a, flags_a) = (ints.clone(), flags.clone());
            let assertions = if has_ints {
                proptest::collection::vec((0usize..5, formula(ints_a, flags_a)), 1..=5).boxed()
            } else {
                proptest::collection::vec(
                    (0usize..5, proptest::sample::select(flags.clone()).prop_map(B::Flag)),
                    1..=3,
                )
                .boxed()
            };
            let objective = if with_objective && has_ints {
                (any::<bool>(), num_term(ints, flags)).prop_map(Some).boxed()
            } else {
                Just(None).boxed()
            };
            (Just(vars2), assertions, objective)
        })
        .prop_map(|(vars, assertions, objective)| Case {
            vars,
            assertions: assertions
                .into_iter()
                .map(|(l, b)| (format!("a{l}"), b))
                .collect(),
            objective,
        })
}

fn build(case: &Case) -> ConstraintProgram<Q> {
    let mut p = ConstraintProgram::new();
    for (i, &(lo, hi, flag)) in case.vars.iter().enumerate() {
        if flag {
            p.bool_var(format!("b{i}"));
        } else {
            p.int_var(format!("x{i}"), lo, hi);
        }
    }
    for (label, b) in &case.assertions {
        p.assert(label.clone(), to_b(b));
    }
    if let Some((max, n)) = &case.objective {
        if *max {
            p.maximize(to_n(n));
        } else {
            p.minimize(to_n(n));
        }
    }
    p
}

fn assignments(vars: &[(i64, i64, bool)]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for &(lo, hi, _) in vars {
        let mut next = Vec::new();
        for prefix in &out {
            for v in lo..=hi {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

fn satisfies(case: &Case, keep: Option<&BTreeSet<String>>, env: &[i64]) -> bool {
    case.assertions
        .iter()
        .filter(|(l, _)| keep.is_none_or(|k| k.contains(l)))
        .all(|(_, b)| eval_b(b, env) == Ok(true))
}

fn enumerate_sat(case: &Case, keep: Option<&BTreeSet<String>>) -> bool {
    assignments(&case.vars).iter().any(|env| satisfies(case, keep, env))
}

fn opts() -> CheckOptions {
    CheckOptions::with_limit(Duration::from_secs(30))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 160, ..ProptestConfig::default() })]

    #[test]
    fn verdict_matches_enumeration(case in case(false)) {
        let p = build(&case);
        let result = check(&p, &opts()).unwrap();
        let expected = enumerate_sat(&case, None);
        match &result {
            SolveResult::Sat { model, .. } => {
                prop_assert!(expected, "engine found a model the oracle rejects");
                let env = model.values().to_vec();
                for (i, &(lo, hi, _)) in case.vars.iter().enumerate() {
                    prop_assert!(lo <= env[i] && env[i] <= hi);
                }
                prop_assert!(satisfies(&case, None, &env));
            }
            SolveResult::Unsat { core } => {
                prop_assert!(!expected, "engine missed a model");
                let labels: BTreeSet<String> = case.assertions.iter().map(|(l, _)| l.clone()).collect();
                prop_assert!(core.is_subset(&labels));
                prop_assert!(!enumerate_sat(&case, Some(core)), "core {:?} is satisfiable", core);
            }
            SolveResult::Timeout { .. } => prop_assert!(false, "timeout on a tiny program"),
        }
        let again = check(&p, &opts()).unwrap();
        prop_assert_eq!(result, again);
    }

    #[test]
    fn optimum_matches_enumeration(case in case(true)) {
        let p = build(&case);
        let result = check(&p, &opts()).unwrap();
        let Some((maximize, objective)) = &case.objective else { return Ok(()); };
        let mut best: Option<Q> = None;
        let mut any = false;
        for env in assignments(&case.vars) {
            if !satisfies(&case, None, &env) {
                continue;
            }
            any = true;
            if let Ok(v) = eval_n(objective, &env) {
                best = Some(match best {
                    None => v,
                    Some(b) => if *maximize { b.max(v) } else { b.min(v) },
                });
            }
        }
        match result {
            SolveResult::Sat { model, objective_value } => {
                prop_assert!(any);
                prop_assert!(satisfies(&case, None, model.values()));
                prop_assert_eq!(objective_value, best);
                if let Some(v) = objective_value {
                    prop_assert_eq!(eval_n(objective, model.values()), Ok(v));
                }
            }
            SolveResult::Unsat { .. } => prop_assert!(!any),
            SolveResult::Timeout { .. } => prop_assert!(false, "timeout on a tiny program"),
        }
    }

    #[test]
    fn minimized_cores_are_deletion_minimal(case in case(false)) {
        let p = build(&case);
        let SolveResult::Unsat { core } = check(&p, &opts()).unwrap() else { return Ok(()); };
        let m = minimize_core(&p, &core, Duration::from_secs(30)).unwrap();
        prop_assert!(m.minimal);
        prop_assert!(m.labels.is_subset(&core));
        prop_assert!(!enumerate_sat(&case, Some(&m.labels)));
        for label in &m.labels {
            let mut fewer = m.labels.clone();
            fewer.remove(label);
            prop_assert!(enumerate_sat(&case, Some(&fewer)), "dropping {} stays unsat", label);
        }
    }
}
