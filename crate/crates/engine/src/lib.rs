//! Finite-domain constraint engine.
//!
//! Programs declare bounded integer and boolean variables, add assertions
//! under string labels, and optionally set a linear objective. [`check`]
//! answers with a model, an unsat core made of labels, or a timeout.
//! Arithmetic is exact: the engine is generic over a [`Scalar`] and the
//! aliases below fix it to `Ratio<i64>`.

mod absint;
mod core;
mod domain;
pub mod eval;
pub mod program;
pub mod scalar;
pub mod solver;
pub mod term;

pub use crate::core::{minimize_core, CoreError, MinimizedCore};
pub use eval::{evaluate, evaluate_with, holds, Assignment, EvalError, Value};
pub use program::{
    Assertion, ConstraintProgram, Direction, Model, Objective, ProgramError, SolveResult, VarDecl,
    VarKind,
};
pub use scalar::Scalar;
pub use solver::{check, check_with_stats, CheckOptions, Stats, DEFAULT_TIME_LIMIT};
pub use term::{CmpOp, Sort, SortError, Term, VarId};

pub type Rational = num_rational::Ratio<i64>;
pub type Program = ConstraintProgram<Rational>;
pub type Formula = Term<Rational>;
pub type Outcome = SolveResult<Rational>;
