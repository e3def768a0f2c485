//! Term language of the engine.
//!
//! Numeric terms are linear: sums, differences, negation and scaling by a
//! constant, plus `ite` and `element` (selection of the `i`-th entry of a
//! constant table by an integer-valued term). Boolean terms are comparisons
//! and the usual connectives.

use std::fmt;
use std::sync::Arc;

use crate::scalar::Scalar;

/// Index of a declared variable inside its program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "distinct",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn holds<T: Ord>(self, a: &T, b: &T) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Term<S> {
    Var(VarId),
    Const(S),
    Bool(bool),
    Add(Vec<Term<S>>),
    Sub(Box<Term<S>>, Box<Term<S>>),
    Neg(Box<Term<S>>),
    /// Multiplication by a constant factor.
    Scale(S, Box<Term<S>>),
    Cmp(CmpOp, Box<Term<S>>, Box<Term<S>>),
    Not(Box<Term<S>>),
    And(Vec<Term<S>>),
    Or(Vec<Term<S>>),
    Implies(Box<Term<S>>, Box<Term<S>>),
    Ite(Box<Term<S>>, Box<Term<S>>, Box<Term<S>>),
    Element(Arc<[S]>, Box<Term<S>>),
}

/// Sort of a term. Integer terms may be used wherever a numeric term is
/// expected; only `element` indices require `Int`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sort {
    Bool,
    Int,
    Real,
}

impl Sort {
    fn is_numeric(self) -> bool {
        matches!(self, Sort::Int | Sort::Real)
    }

    fn join(self, other: Sort) -> Sort {
        if self == Sort::Int && other == Sort::Int {
            Sort::Int
        } else {
            Sort::Real
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SortError {
    #[error("variable #{0} is not declared")]
    UndeclaredVar(usize),
    #[error("expected a {expected} term in {context}")]
    Mismatch {
        expected: &'static str,
        context: &'static str,
    },
    #[error("element table is empty")]
    EmptyTable,
    #[error("element index must be integer-valued")]
    NonIntegerIndex,
}

impl<S: Scalar> Term<S> {
    pub fn var(id: VarId) -> Self {
        Term::Var(id)
    }

    pub fn int(value: i64) -> Self {
        Term::Const(S::from_int(value))
    }

    pub fn constant(value: S) -> Self {
        Term::Const(value)
    }

    pub fn sum<I: IntoIterator<Item = Term<S>>>(terms: I) -> Self {
        Term::Add(terms.into_iter().collect())
    }

    pub fn all<I: IntoIterator<Item = Term<S>>>(terms: I) -> Self {
        Term::And(terms.into_iter().collect())
    }

    pub fn any<I: IntoIterator<Item = Term<S>>>(terms: I) -> Self {
        Term::Or(terms.into_iter().collect())
    }

    pub fn element(table: impl Into<Arc<[S]>>, index: Term<S>) -> Self {
        Term::Element(table.into(), Box::new(index))
    }

    pub fn ite(cond: Term<S>, then: Term<S>, otherwise: Term<S>) -> Self {
        Term::Ite(Box::new(cond), Box::new(then), Box::new(otherwise))
    }

    pub fn plus(self, other: Term<S>) -> Self {
        Term::Add(vec![self, other])
    }

    pub fn minus(self, other: Term<S>) -> Self {
        Term::Sub(Box::new(self), Box::new(other))
    }

    pub fn negate(self) -> Self {
        Term::Neg(Box::new(self))
    }

    pub fn times(self, factor: S) -> Self {
        Term::Scale(factor, Box::new(self))
    }

    fn cmp(self, op: CmpOp, other: Term<S>) -> Self {
        Term::Cmp(op, Box::new(self), Box::new(other))
    }

    pub fn equals(self, other: Term<S>) -> Self {
        self.cmp(CmpOp::Eq, other)
    }

    pub fn differs(self, other: Term<S>) -> Self {
        self.cmp(CmpOp::Ne, other)
    }

    pub fn less_than(self, other: Term<S>) -> Self {
        self.cmp(CmpOp::Lt, other)
    }

    pub fn at_most(self, other: Term<S>) -> Self {
        self.cmp(CmpOp::Le, other)
    }

    pub fn greater_than(self, other: Term<S>) -> Self {
        self.cmp(CmpOp::Gt, other)
    }

    pub fn at_least(self, other: Term<S>) -> Self {
        self.cmp(CmpOp::Ge, other)
    }

    pub fn not(self) -> Self {
        Term::Not(Box::new(self))
    }

    pub fn and(self, other: Term<S>) -> Self {
        Term::And(vec![self, other])
    }

    pub fn or(self, other: Term<S>) -> Self {
        Term::Or(vec![self, other])
    }

    pub fn implies(self, other: Term<S>) -> Self {
        Term::Implies(Box::new(self), Box::new(other))
    }

    /// Infers the sort of the term. `var_sort` gives the sort of each
    /// declared variable, or `None` for an undeclared index.
    pub fn sort_with(&self, var_sort: &dyn Fn(VarId) -> Option<Sort>) -> Result<Sort, SortError> {
        let numeric = |t: &Term<S>, context| -> Result<Sort, SortError> {
            let s = t.sort_with(var_sort)?;
            if s.is_numeric() {
                Ok(s)
            } else {
                Err(SortError::Mismatch {
                    expected: "numeric",
                    context,
                })
            }
        };
        let boolean = |t: &Term<S>, context| -> Result<(), SortError> {
            match t.sort_with(var_sort)? {
                Sort::Bool => Ok(()),
                _ => Err(SortError::Mismatch {
                    expected: "boolean",
                    context,
                }),
            }
        };
        Ok(match self {
            Term::Var(id) => var_sort(*id).ok_or(SortError::UndeclaredVar(id.0))?,
            Term::Const(c) => {
                if c.as_integer().is_some() {
                    Sort::Int
                } else {
                    Sort::Real
                }
            }
            Term::Bool(_) => Sort::Bool,
            Term::Add(items) => {
                let mut sort = Sort::Int;
                for item in items {
                    sort = sort.join(numeric(item, "sum")?);
                }
                sort
            }
            Term::Sub(a, b) => numeric(a, "difference")?.join(numeric(b, "difference")?),
            Term::Neg(a) => numeric(a, "negation")?,
            Term::Scale(factor, a) => {
                let inner = numeric(a, "scaling")?;
                if factor.as_integer().is_some() {
                    inner
                } else {
                    Sort::Real
                }
            }
            Term::Cmp(_, a, b) => {
                numeric(a, "comparison")?;
                numeric(b, "comparison")?;
                Sort::Bool
            }
            Term::Not(a) => {
                boolean(a, "negation")?;
                Sort::Bool
            }
            Term::And(items) | Term::Or(items) => {
                for item in items {
                    boolean(item, "connective")?;
                }
                Sort::Bool
            }
            Term::Implies(a, b) => {
                boolean(a, "implication")?;
                boolean(b, "implication")?;
                Sort::Bool
            }
            Term::Ite(c, t, e) => {
                boolean(c, "if-then-else condition")?;
                let ts = t.sort_with(var_sort)?;
                let es = e.sort_with(var_sort)?;
                match (ts, es) {
                    (Sort::Bool, Sort::Bool) => Sort::Bool,
                    (a, b) if a.is_numeric() && b.is_numeric() => a.join(b),
                    _ => {
                        return Err(SortError::Mismatch {
                            expected: "branch-compatible",
                            context: "if-then-else",
                        })
                    }
                }
            }
            Term::Element(table, index) => {
                if table.is_empty() {
                    return Err(SortError::EmptyTable);
                }
                if numeric(index, "element index")? != Sort::Int {
                    return Err(SortError::NonIntegerIndex);
                }
                if table.iter().all(|v| v.as_integer().is_some()) {
                    Sort::Int
                } else {
                    Sort::Real
                }
            }
        })
    }

    /// Every variable the term mentions, in first-occurrence order.
    pub fn variables(&self) -> Vec<VarId> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<VarId>) {
        match self {
            Term::Var(id) => {
                if !out.contains(id) {
                    out.push(*id);
                }
            }
            Term::Const(_) | Term::Bool(_) => {}
            Term::Add(items) | Term::And(items) | Term::Or(items) => {
                items.iter().for_each(|t| t.collect_vars(out))
            }
            Term::Sub(a, b) | Term::Cmp(_, a, b) | Term::Implies(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Term::Neg(a) | Term::Scale(_, a) | Term::Not(a) | Term::Element(_, a) => {
                a.collect_vars(out)
            }
            Term::Ite(c, t, e) => {
                c.collect_vars(out);
                t.collect_vars(out);
                e.collect_vars(out);
            }
        }
    }

    /// Renders the term as an s-expression, naming variables through `name`.
    pub fn to_sexpr(&self, name: &dyn Fn(VarId) -> String) -> String {
        let mut out = String::new();
        self.write_sexpr(&mut out, name);
        out
    }

    fn write_sexpr(&self, out: &mut String, name: &dyn Fn(VarId) -> String) {
        use std::fmt::Write;
        let list = |out: &mut String, head: &str, items: &[&Term<S>]| {
            out.push('(');
            out.push_str(head);
            for item in items {
                out.push(' ');
                item.write_sexpr(out, name);
            }
            out.push(')');
        };
        match self {
            Term::Var(id) => out.push_str(&name(*id)),
            Term::Const(c) => {
                let _ = write!(out, "{c}");
            }
            Term::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Term::Add(items) => list(out, "+", &items.iter().collect::<Vec<_>>()),
            Term::Sub(a, b) => list(out, "-", &[a, b]),
            Term::Neg(a) => list(out, "-", &[a]),
            Term::Scale(c, a) => {
                let _ = write!(out, "(* {c} ");
                a.write_sexpr(out, name);
                out.push(')');
            }
            Term::Cmp(op, a, b) => list(out, op.symbol(), &[a, b]),
            Term::Not(a) => list(out, "not", &[a]),
            Term::And(items) => list(out, "and", &items.iter().collect::<Vec<_>>()),
            Term::Or(items) => list(out, "or", &items.iter().collect::<Vec<_>>()),
            Term::Implies(a, b) => list(out, "=>", &[a, b]),
            Term::Ite(c, t, e) => list(out, "ite", &[c, t, e]),
            Term::Element(table, index) => {
                out.push_str("(element [");
                for (i, v) in table.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    let _ = write!(out, "{v}");
                }
                out.push_str("] ");
                index.write_sexpr(out, name);
                out.push(')');
            }
        }
    }
}

impl<S: Scalar> fmt::Display for Term<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sexpr(&|id| format!("v{}", id.0)))
    }
}
