use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use crate::program::{ConstraintProgram, ProgramError, SolveResult};
use crate::scalar::Scalar;
use crate::solver::{check, CheckOptions};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimizedCore {
    pub labels: BTreeSet<String>,
    /// False when some deletion test ran out of time, in which case the
    /// labels are still unsatisfiable together but may not be minimal.
    pub minimal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoreError {
    #[error(transparent)]
    Program(#[from] ProgramError),
    #[error("the given labels are satisfiable together")]
    Satisfiable,
    #[error("could not confirm the given labels are unsatisfiable before the deadline")]
    Timeout,
}

/// Shrinks `core` by deletion: each label is dropped in turn and kept out
/// whenever the rest stays unsatisfiable. When a re-check reports a smaller
/// core, the working set jumps straight to it.
///
/// `time_limit` bounds the whole procedure, not each re-check.
pub fn minimize_core<S: Scalar>(
    program: &ConstraintProgram<S>,
    core: &BTreeSet<String>,
    time_limit: Duration,
) -> Result<MinimizedCore, CoreError> {
    let deadline = Instant::now() + time_limit;
    let mut base = program.clone();
    base.clear_objective();
    let remaining = |d: Instant| CheckOptions::with_limit(d.saturating_duration_since(Instant::now()));

    let mut current = match check(&base.restrict(core), &remaining(deadline))? {
        SolveResult::Unsat { core: found } => found,
        SolveResult::Sat { .. } => return Err(CoreError::Satisfiable),
        SolveResult::Timeout { .. } => return Err(CoreError::Timeout),
    };
    let mut minimal = true;
    let order: Vec<String> = current.iter().cloned().collect();
    for label in order {
        if !current.contains(&label) {
            continue;
        }
        let mut trial = current.clone();
        trial.remove(&label);
        match check(&base.restrict(&trial), &remaining(deadline))? {
            SolveResult::Unsat { core: found } => current = found,
            SolveResult::Sat { .. } => {}
            SolveResult::Timeout { .. } => minimal = false,
        }
    }
    Ok(MinimizedCore {
        labels: current,
        minimal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Term;

    fn labels(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn drops_irrelevant_assertion() {
        let mut p = ConstraintProgram::<i64>::new();
        let x = p.int_var("x", 0, 2);
        p.assert("a", Term::var(x).less_than(Term::int(1)));
        p.assert("b", Term::var(x).greater_than(Term::int(1)));
        p.assert("c", Term::var(x).at_least(Term::int(0)));
        let m = minimize_core(&p, &labels(&["a", "b", "c"]), Duration::from_secs(5)).unwrap();
        assert_eq!(m.labels, labels(&["a", "b"]));
        assert!(m.minimal);
        let again = minimize_core(&p, &m.labels, Duration::from_secs(5)).unwrap();
        assert_eq!(again.labels, m.labels);
    }

    #[test]
    fn satisfiable_input_is_rejected() {
        let mut p = ConstraintProgram::<i64>::new();
        let x = p.int_var("x", 0, 2);
        p.assert("a", Term::var(x).less_than(Term::int(1)));
        assert_eq!(
            minimize_core(&p, &labels(&["a"]), Duration::from_secs(5)),
            Err(CoreError::Satisfiable)
        );
    }
}
