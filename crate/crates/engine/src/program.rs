use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::time::Duration;

use crate::scalar::Scalar;
use crate::term::{Sort, SortError, Term, VarId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Int,
    Bool,
}

/// A declared variable. Bounds are inclusive; boolean variables range over
/// `{0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub kind: VarKind,
    pub lo: i64,
    pub hi: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assertion<S> {
    pub label: String,
    pub formula: Term<S>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Objective<S> {
    pub direction: Direction,
    pub term: Term<S>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProgramError {
    #[error("variable `{0}` has an empty domain")]
    EmptyDomain(String),
    #[error("variable `{0}` has more values than the engine supports")]
    DomainTooLarge(String),
    #[error("assertion #{0} has an empty label")]
    EmptyLabel(usize),
    #[error("assertion `{label}` is ill-typed: {source}")]
    IllTyped { label: String, source: SortError },
    #[error("assertion `{0}` is not a boolean formula")]
    NotBoolean(String),
    #[error("objective is ill-typed: {0}")]
    BadObjective(SortError),
    #[error("objective must be numeric")]
    NonNumericObjective,
}

/// Variables, labelled assertions and an optional objective.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConstraintProgram<S> {
    vars: Vec<VarDecl>,
    assertions: Vec<Assertion<S>>,
    objective: Option<Objective<S>>,
}

impl<S: Scalar> ConstraintProgram<S> {
    pub fn new() -> Self {
        ConstraintProgram {
            vars: Vec::new(),
            assertions: Vec::new(),
            objective: None,
        }
    }

    pub fn int_var(&mut self, name: impl Into<String>, lo: i64, hi: i64) -> VarId {
        self.vars.push(VarDecl {
            name: name.into(),
            kind: VarKind::Int,
            lo,
            hi,
        });
        VarId(self.vars.len() - 1)
    }

    pub fn bool_var(&mut self, name: impl Into<String>) -> VarId {
        self.vars.push(VarDecl {
            name: name.into(),
            kind: VarKind::Bool,
            lo: 0,
            hi: 1,
        });
        VarId(self.vars.len() - 1)
    }

    /// Adds a tracked assertion.
    pub fn assert(&mut self, label: impl Into<String>, formula: Term<S>) {
        self.assertions.push(Assertion {
            label: label.into(),
            formula,
        });
    }

    pub fn minimize(&mut self, term: Term<S>) {
        self.objective = Some(Objective {
            direction: Direction::Minimize,
            term,
        });
    }

    pub fn maximize(&mut self, term: Term<S>) {
        self.objective = Some(Objective {
            direction: Direction::Maximize,
            term,
        });
    }

    pub fn clear_objective(&mut self) {
        self.objective = None;
    }

    pub fn vars(&self) -> &[VarDecl] {
        &self.vars
    }

    pub fn var(&self, id: VarId) -> &VarDecl {
        &self.vars[id.0]
    }

    pub fn var_named(&self, name: &str) -> Option<VarId> {
        self.vars.iter().position(|v| v.name == name).map(VarId)
    }

    pub fn assertions(&self) -> &[Assertion<S>] {
        &self.assertions
    }

    pub fn objective(&self) -> Option<&Objective<S>> {
        self.objective.as_ref()
    }

    /// Distinct labels in first-assertion order.
    pub fn labels(&self) -> Vec<&str> {
        let mut seen = BTreeSet::new();
        self.assertions
            .iter()
            .filter(|a| seen.insert(a.label.as_str()))
            .map(|a| a.label.as_str())
            .collect()
    }

    /// Copy of the program keeping only assertions whose label is in `keep`.
    pub fn restrict(&self, keep: &BTreeSet<String>) -> Self {
        ConstraintProgram {
            vars: self.vars.clone(),
            assertions: self
                .assertions
                .iter()
                .filter(|a| keep.contains(&a.label))
                .cloned()
                .collect(),
            objective: self.objective.clone(),
        }
    }

    /// Copy of the program without the assertions carrying `label`.
    pub fn without_label(&self, label: &str) -> Self {
        ConstraintProgram {
            vars: self.vars.clone(),
            assertions: self
                .assertions
                .iter()
                .filter(|a| a.label != label)
                .cloned()
                .collect(),
            objective: self.objective.clone(),
        }
    }

    pub(crate) fn sort_of(&self, id: VarId) -> Option<Sort> {
        self.vars.get(id.0).map(|v| match v.kind {
            VarKind::Int => Sort::Int,
            VarKind::Bool => Sort::Bool,
        })
    }

    pub fn validate(&self) -> Result<(), ProgramError> {
        for v in &self.vars {
            if v.lo > v.hi {
                return Err(ProgramError::EmptyDomain(v.name.clone()));
            }
            if v.hi.abs_diff(v.lo) >= crate::domain::MAX_DOMAIN {
                return Err(ProgramError::DomainTooLarge(v.name.clone()));
            }
        }
        let lookup = |id: VarId| self.sort_of(id);
        for (i, a) in self.assertions.iter().enumerate() {
            if a.label.is_empty() {
                return Err(ProgramError::EmptyLabel(i));
            }
            match a.formula.sort_with(&lookup) {
                Ok(Sort::Bool) => {}
                Ok(_) => return Err(ProgramError::NotBoolean(a.label.clone())),
                Err(source) => {
                    return Err(ProgramError::IllTyped {
                        label: a.label.clone(),
                        source,
                    })
                }
            }
        }
        if let Some(obj) = &self.objective {
            match obj.term.sort_with(&lookup) {
                Ok(Sort::Bool) => return Err(ProgramError::NonNumericObjective),
                Ok(_) => {}
                Err(e) => return Err(ProgramError::BadObjective(e)),
            }
        }
        Ok(())
    }

    /// Plain-text dump: variable declarations, then one `label :: sexpr`
    /// line per assertion.
    pub fn dump(&self) -> String {
        let name = |id: VarId| {
            self.vars
                .get(id.0)
                .map(|v| v.name.clone())
                .unwrap_or_else(|| format!("?{}", id.0))
        };
        let mut out = String::new();
        for v in &self.vars {
            let kind = match v.kind {
                VarKind::Int => "int",
                VarKind::Bool => "bool",
            };
            let _ = writeln!(out, "; {kind} {} [{}, {}]", v.name, v.lo, v.hi);
        }
        for a in &self.assertions {
            let _ = writeln!(out, "{} :: {}", a.label, a.formula.to_sexpr(&name));
        }
        if let Some(obj) = &self.objective {
            let dir = match obj.direction {
                Direction::Minimize => "minimize",
                Direction::Maximize => "maximize",
            };
            let _ = writeln!(out, "; {dir} {}", obj.term.to_sexpr(&name));
        }
        out
    }
}

/// A total assignment of the program's variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    names: Vec<String>,
    values: Vec<i64>,
}

impl Model {
    pub fn new(names: Vec<String>, values: Vec<i64>) -> Self {
        assert_eq!(names.len(), values.len());
        Model { names, values }
    }

    pub fn value(&self, id: VarId) -> i64 {
        self.values[id.0]
    }

    pub fn flag(&self, id: VarId) -> bool {
        self.values[id.0] != 0
    }

    pub fn get(&self, name: &str) -> Option<i64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.values[i])
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, i64)> {
        self.names.iter().map(String::as_str).zip(self.values.iter().copied())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolveResult<S> {
    Sat {
        model: Model,
        objective_value: Option<S>,
    },
    Unsat {
        core: BTreeSet<String>,
    },
    Timeout {
        elapsed: Duration,
    },
}

impl<S> SolveResult<S> {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat { .. })
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SolveResult::Unsat { .. })
    }

    pub fn model(&self) -> Option<&Model> {
        match self {
            SolveResult::Sat { model, .. } => Some(model),
            _ => None,
        }
    }

    pub fn core(&self) -> Option<&BTreeSet<String>> {
        match self {
            SolveResult::Unsat { core } => Some(core),
            _ => None,
        }
    }
}
