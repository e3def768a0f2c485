use std::collections::BTreeSet;
use std::time::Duration;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use tripsolve_engine::{
    check, evaluate, minimize_core, CheckOptions, ConstraintProgram, EvalError, Model, Program, ProgramError,
    Rational, Scalar, SolveResult, Term, Value,
};

fn model(pairs: &[(&str, i64)]) -> Model {
    Model::new(
        pairs.iter().map(|(n, _)| n.to_string()).collect(),
        pairs.iter().map(|(_, v)| *v).collect(),
    )
}

#[test]
fn element_selects_by_index() {
    let mut p = Program::new();
    let x = p.int_var("x", 0, 5);
    let t = Term::element(vec![Rational::from(10), Rational::from(20), Rational::from(30)], Term::var(x));
    assert_eq!(evaluate(&model(&[("x", 2)]), &t), Ok(Value::Num(Rational::from(30))));
    assert!(matches!(
        evaluate(&model(&[("x", 5)]), &t),
        Err(EvalError::IndexOutOfRange { len: 3, .. })
    ));
}

#[test]
fn ite_on_boolean_variable() {
    let mut p = Program::new();
    let b = p.bool_var("b");
    let t: Term<Rational> = Term::ite(Term::var(b), Term::int(5), Term::int(7));
    assert_eq!(evaluate(&model(&[("b", 1)]), &t), Ok(Value::Num(Rational::from(5))));
    assert_eq!(evaluate(&model(&[("b", 0)]), &t), Ok(Value::Num(Rational::from(7))));
}

#[test]
fn unbound_variable_is_an_error() {
    let t: Term<Rational> = Term::var(tripsolve_engine::VarId(3)).plus(Term::int(1));
    assert_eq!(evaluate(&model(&[("x", 1)]), &t), Err(EvalError::Unbound(3)));
}

#[test]
fn kleene_connectives_absorb_element_errors() {
    let mut p = Program::new();
    let i = p.int_var("i", -1, 2);
    let pick = Term::element(vec![Rational::from(4)], Term::var(i)).equals(Term::int(4));
    let guarded = Term::var(i).equals(Term::int(-1)).or(pick.clone());
    let m = model(&[("i", -1)]);
    assert_eq!(evaluate(&m, &guarded), Ok(Value::Bool(true)));
    let conj = Term::var(i).equals(Term::int(0)).and(pick);
    assert_eq!(evaluate(&m, &conj), Ok(Value::Bool(false)));
}

#[test]
fn validation_rejects_bad_programs() {
    let mut p = Program::new();
    let x = p.int_var("x", 0, 3);
    p.assert("", Term::var(x).equals(Term::int(1)));
    assert_eq!(p.validate(), Err(ProgramError::EmptyLabel(0)));

    let mut p = Program::new();
    let x = p.int_var("x", 0, 3);
    p.assert("numeric", Term::var(x).plus(Term::int(1)));
    assert_eq!(p.validate(), Err(ProgramError::NotBoolean("numeric".into())));

    let mut p = Program::new();
    p.int_var("x", 4, 3);
    assert!(matches!(p.validate(), Err(ProgramError::EmptyDomain(_))));

    let mut p = Program::new();
    let x = p.int_var("x", 0, 3);
    p.assert("half index", Term::element(vec![Rational::from(1)], Term::var(x).times(Rational::new(1, 2))).equals(Term::int(1)));
    assert!(matches!(p.validate(), Err(ProgramError::IllTyped { .. })));
    assert!(check(&p, &CheckOptions::default()).is_err());
}

#[test]
fn dump_has_one_line_per_assertion() {
    let mut p = Program::new();
    let x = p.int_var("x", 0, 2);
    let b = p.bool_var("b");
    p.assert("a", Term::var(x).less_than(Term::int(1)));
    p.assert("guard", Term::var(b).implies(Term::var(x).differs(Term::constant(Rational::new(1, 2)))));
    let dump = p.dump();
    let lines: Vec<&str> = dump.lines().filter(|l| !l.starts_with(';')).collect();
    assert_eq!(lines, vec!["a :: (< x 1)", "guard :: (=> b (distinct x 1/2))"]);
    assert!(dump.starts_with("; int x [0, 2]\n; bool b [0, 1]\n"));
}

/// The same program solved with different scalar types gives the same
/// answer.
fn parity_program<S: Scalar>() -> ConstraintProgram<S> {
    let mut p = ConstraintProgram::new();
    let x = p.int_var("x", 0, 9);
    let y = p.int_var("y", 0, 9);
    let price = Term::element(vec![S::from_int(7), S::from_int(3), S::from_int(8), S::from_int(1)], Term::var(y));
    p.assert("in table", Term::var(y).at_most(Term::int(3)));
    p.assert("spend", Term::var(x).times(S::from_int(2)).plus(price).at_least(Term::int(12)));
    p.minimize(Term::var(x).plus(Term::var(y)));
    p
}

#[test]
fn scalar_types_agree() {
    let opts = CheckOptions::default();
    let a = check(&parity_program::<i64>(), &opts).unwrap();
    let b = check(&parity_program::<i128>(), &opts).unwrap();
    let c = check(&parity_program::<Rational>(), &opts).unwrap();
    let d = check(&parity_program::<BigRational>(), &opts).unwrap();
    assert_eq!(a.model(), b.model());
    assert_eq!(a.model(), c.model());
    assert_eq!(a.model(), d.model());
    match d {
        SolveResult::Sat { objective_value, .. } => {
            assert_eq!(objective_value, Some(Ratio::from_integer(BigInt::from(3))));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn exact_rational_budget() {
    // 0.05 * 100 * 1 + 1/3 + 2/3 = 6 exactly; a float sum would not compare equal
    let mut p = Program::new();
    let b = p.bool_var("b");
    let spent = Term::sum([
        Term::ite(Term::var(b), Term::constant(Rational::new(1, 20)).times(Rational::from(100)), Term::int(0)),
        Term::constant(Rational::new(1, 3)),
        Term::constant(Rational::new(2, 3)),
    ]);
    p.assert("budget enough", spent.clone().equals(Term::int(6)));
    let r = check(&p, &CheckOptions::default()).unwrap();
    assert_eq!(r.model().unwrap().get("b"), Some(1));
}

#[test]
fn minimize_core_handles_seeded_programs() {
    // five assertions, only "low" and "high" conflict
    let mut p = Program::new();
    let x = p.int_var("x", 0, 10);
    let y = p.int_var("y", 0, 10);
    p.assert("low", Term::var(x).less_than(Term::int(3)));
    p.assert("high", Term::var(x).greater_than(Term::int(6)));
    p.assert("link", Term::var(y).equals(Term::var(x).plus(Term::int(1))));
    p.assert("cap", Term::var(y).at_most(Term::int(10)));
    p.assert("pos", Term::var(y).at_least(Term::int(0)));
    let core = match check(&p, &CheckOptions::default()).unwrap() {
        SolveResult::Unsat { core } => core,
        other => panic!("{other:?}"),
    };
    let m = minimize_core(&p, &core, Duration::from_secs(5)).unwrap();
    let expected: BTreeSet<String> = ["high", "low"].iter().map(|s| s.to_string()).collect();
    assert_eq!(m.labels, expected);
    for label in &m.labels {
        let mut fewer = m.labels.clone();
        fewer.remove(label);
        assert!(check(&p.restrict(&fewer), &CheckOptions::default()).unwrap().is_sat());
    }
}

#[test]
fn zero_time_limit_times_out() {
    let mut p = Program::new();
    let x = p.int_var("x", 0, 2);
    p.assert("a", Term::var(x).equals(Term::int(1)));
    let r = check(&p, &CheckOptions::with_limit(Duration::ZERO)).unwrap();
    assert!(matches!(r, SolveResult::Timeout { .. }));
}
