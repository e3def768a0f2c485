use std::fmt;

use crate::program::Model;
use crate::scalar::Scalar;
use crate::term::{Term, VarId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value<S> {
    Num(S),
    Bool(bool),
}

impl<S: Scalar> Value<S> {
    pub fn as_num(&self) -> Option<&S> {
        match self {
            Value::Num(v) => Some(v),
            Value::Bool(_) => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            Value::Num(_) => None,
        }
    }
}

impl<S: Scalar> fmt::Display for Value<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Num(v) => write!(f, "{v}"),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("element index {index} outside table of length {len}")]
    IndexOutOfRange { index: String, len: usize },
    #[error("variable #{0} has no value")]
    Unbound(usize),
    #[error("ill-typed term: {0}")]
    Type(&'static str),
}

/// Source of variable values for [`evaluate_with`].
pub trait Assignment {
    fn lookup(&self, var: VarId) -> Option<i64>;
}

impl Assignment for Model {
    fn lookup(&self, var: VarId) -> Option<i64> {
        self.values().get(var.0).copied()
    }
}

impl Assignment for [i64] {
    fn lookup(&self, var: VarId) -> Option<i64> {
        self.get(var.0).copied()
    }
}

impl Assignment for Vec<i64> {
    fn lookup(&self, var: VarId) -> Option<i64> {
        self.get(var.0).copied()
    }
}

impl Assignment for [Option<i64>] {
    fn lookup(&self, var: VarId) -> Option<i64> {
        self.get(var.0).copied().flatten()
    }
}

impl<F: Fn(VarId) -> Option<i64>> Assignment for F {
    fn lookup(&self, var: VarId) -> Option<i64> {
        self(var)
    }
}

/// Evaluates `term` under a model.
///
/// Boolean variables are read as `0`/`1`; a numeric position yields the
/// integer itself. An out-of-range `element` is an error. Connectives absorb
/// errors the Kleene way: `and` is false as soon as one argument is false,
/// `or` is true as soon as one argument is true, and `ite` only evaluates
/// the selected branch. An unbound variable always propagates.
pub fn evaluate<S: Scalar>(model: &Model, term: &Term<S>) -> Result<Value<S>, EvalError> {
    evaluate_with(model, term)
}

pub fn evaluate_with<S: Scalar, A: Assignment + ?Sized>(
    env: &A,
    term: &Term<S>,
) -> Result<Value<S>, EvalError> {
    match eval_inner(env, term) {
        Ok(v) => Ok(v),
        Err(Failure::Eval(e)) | Err(Failure::Hard(e)) => Err(e),
    }
}

/// Whether a formula holds: evaluation succeeded and produced `true`.
pub fn holds<S: Scalar, A: Assignment + ?Sized>(env: &A, term: &Term<S>) -> Result<bool, EvalError> {
    match eval_inner(env, term) {
        Ok(Value::Bool(b)) => Ok(b),
        Ok(Value::Num(v)) => Ok(!v.is_zero()),
        Err(Failure::Eval(_)) => Ok(false),
        Err(Failure::Hard(e)) => Err(e),
    }
}

enum Failure {
    /// Recoverable by connectives (out-of-range element).
    Eval(EvalError),
    /// Unbound variable or type confusion; never absorbed.
    Hard(EvalError),
}

fn num<S: Scalar, A: Assignment + ?Sized>(env: &A, t: &Term<S>) -> Result<S, Failure> {
    match eval_inner(env, t)? {
        Value::Num(v) => Ok(v),
        Value::Bool(_) => Err(Failure::Hard(EvalError::Type("expected a number"))),
    }
}

fn boolean<S: Scalar, A: Assignment + ?Sized>(env: &A, t: &Term<S>) -> Result<bool, Failure> {
    match eval_inner(env, t)? {
        Value::Bool(b) => Ok(b),
        // boolean variables are stored as 0/1
        Value::Num(v) => Ok(!v.is_zero()),
    }
}

fn junction<S: Scalar, A: Assignment + ?Sized>(
    env: &A,
    items: &[Term<S>],
    dominant: bool,
) -> Result<Value<S>, Failure> {
    let mut pending = None;
    for item in items {
        match boolean(env, item) {
            Ok(b) if b == dominant => return Ok(Value::Bool(dominant)),
            Ok(_) => {}
            Err(Failure::Eval(e)) => {
                pending.get_or_insert(e);
            }
            Err(hard) => return Err(hard),
        }
    }
    match pending {
        Some(e) => Err(Failure::Eval(e)),
        None => Ok(Value::Bool(!dominant)),
    }
}

fn eval_inner<S: Scalar, A: Assignment + ?Sized>(env: &A, term: &Term<S>) -> Result<Value<S>, Failure> {
    Ok(match term {
        Term::Var(id) => {
            let v = env
                .lookup(*id)
                .ok_or(Failure::Hard(EvalError::Unbound(id.0)))?;
            Value::Num(S::from_int(v))
        }
        Term::Const(c) => Value::Num(c.clone()),
        Term::Bool(b) => Value::Bool(*b),
        Term::Add(items) => {
            let mut acc = S::zero();
            for item in items {
                acc = acc + num(env, item)?;
            }
            Value::Num(acc)
        }
        Term::Sub(a, b) => Value::Num(num(env, a)? - num(env, b)?),
        Term::Neg(a) => Value::Num(-num(env, a)?),
        Term::Scale(c, a) => Value::Num(c.clone() * num(env, a)?),
        Term::Cmp(op, a, b) => {
            let x = num(env, a)?;
            let y = num(env, b)?;
            Value::Bool(op.holds(&x, &y))
        }
        Term::Not(a) => Value::Bool(!boolean(env, a)?),
        Term::And(items) => junction(env, items, false)?,
        Term::Or(items) => junction(env, items, true)?,
        Term::Implies(a, b) => {
            let lhs = match boolean(env, a) {
                Ok(x) => Ok(!x),
                Err(f) => Err(f),
            };
            match lhs {
                Ok(true) => Value::Bool(true),
                Ok(false) => Value::Bool(boolean(env, b)?),
                Err(Failure::Eval(e)) => match boolean(env, b) {
                    Ok(true) => Value::Bool(true),
                    Ok(false) | Err(Failure::Eval(_)) => return Err(Failure::Eval(e)),
                    Err(hard) => return Err(hard),
                },
                Err(hard) => return Err(hard),
            }
        }
        Term::Ite(c, t, e) => {
            if boolean(env, c)? {
                eval_inner(env, t)?
            } else {
                eval_inner(env, e)?
            }
        }
        Term::Element(table, index) => {
            let i = num(env, index)?;
            match i.as_integer() {
                Some(k) if k >= 0 && (k as usize) < table.len() => Value::Num(table[k as usize].clone()),
                _ => {
                    return Err(Failure::Eval(EvalError::IndexOutOfRange {
                        index: i.to_string(),
                        len: table.len(),
                    }))
                }
            }
        }
    })
}
