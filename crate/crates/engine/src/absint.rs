//! Abstract evaluation of compiled formulas over interval domains.
//!
//! A formula is flattened into a post-order node array. Numeric nodes carry
//! an interval plus two flags (can produce a value / can raise an error);
//! boolean nodes carry the subset of {true, false, error} they can reach.
//! With every variable fixed the abstraction is exact, which is what lets the
//! search treat "cannot be true" as a sound pruning rule.

use std::sync::Arc;

use crate::domain::Domains;
use crate::scalar::Scalar;
use crate::term::{CmpOp, Term};

pub(crate) const T: u8 = 1;
pub(crate) const F: u8 = 2;
pub(crate) const E: u8 = 4;

#[derive(Debug, Clone)]
pub(crate) enum AVal<S> {
    Num { ok: bool, err: bool, lo: S, hi: S },
    Bool(u8),
}

impl<S: Scalar> AVal<S> {
    fn point(v: S) -> Self {
        AVal::Num {
            ok: true,
            err: false,
            lo: v.clone(),
            hi: v,
        }
    }

    fn failed() -> Self {
        AVal::Num {
            ok: false,
            err: true,
            lo: S::zero(),
            hi: S::zero(),
        }
    }

    pub fn mask(&self) -> u8 {
        match self {
            AVal::Bool(m) => *m,
            AVal::Num { ok, err, lo, hi } => {
                let mut m = 0;
                if *ok {
                    if !(lo.is_zero() && hi.is_zero()) {
                        m |= T;
                    }
                    if *lo <= S::zero() && S::zero() <= *hi {
                        m |= F;
                    }
                }
                if *err {
                    m |= E;
                }
                m
            }
        }
    }
}

#[derive(Debug, Clone)]
enum Op<S> {
    Var(usize),
    Const(S),
    Bool(bool),
    Add,
    Sub,
    Neg,
    Scale(S),
    Cmp(CmpOp),
    Not,
    And,
    Or,
    Implies,
    Ite,
    Element { table: Arc<[S]>, min: S, max: S },
}

#[derive(Debug, Clone)]
struct Node<S> {
    op: Op<S>,
    first: u32,
    len: u32,
}

/// A formula flattened for repeated abstract evaluation.
#[derive(Debug, Clone)]
pub(crate) struct Compiled<S> {
    nodes: Vec<Node<S>>,
    children: Vec<u32>,
    /// Distinct variables, ascending.
    pub vars: Vec<usize>,
    /// For each entry of `vars`: the nodes whose value depends on it, in
    /// post-order.
    paths: Vec<Vec<u32>>,
}

impl<S: Scalar> Compiled<S> {
    pub fn new(term: &Term<S>) -> Self {
        let mut c = Compiled {
            nodes: Vec::new(),
            children: Vec::new(),
            vars: Vec::new(),
            paths: Vec::new(),
        };
        c.push(term);
        let n = c.nodes.len();
        let mut deps: Vec<Vec<usize>> = vec![Vec::new(); n];
        for i in 0..n {
            let node = &c.nodes[i];
            let mut mine: Vec<usize> = Vec::new();
            if let Op::Var(v) = node.op {
                mine.push(v);
            }
            for k in node.first..node.first + node.len {
                let ch = c.children[k as usize] as usize;
                mine.extend(deps[ch].iter().copied());
            }
            mine.sort_unstable();
            mine.dedup();
            deps[i] = mine;
        }
        let mut vars: Vec<usize> = deps[n - 1].clone();
        vars.sort_unstable();
        let mut paths = vec![Vec::new(); vars.len()];
        for (i, d) in deps.iter().enumerate() {
            for v in d {
                let pos = vars.binary_search(v).expect("dependency of root");
                paths[pos].push(i as u32);
            }
        }
        c.vars = vars;
        c.paths = paths;
        c
    }

    fn push(&mut self, term: &Term<S>) -> u32 {
        let (op, kids): (Op<S>, Vec<&Term<S>>) = match term {
            Term::Var(id) => (Op::Var(id.0), vec![]),
            Term::Const(c) => (Op::Const(c.clone()), vec![]),
            Term::Bool(b) => (Op::Bool(*b), vec![]),
            Term::Add(items) => (Op::Add, items.iter().collect()),
            Term::Sub(a, b) => (Op::Sub, vec![a, b]),
            Term::Neg(a) => (Op::Neg, vec![a]),
            Term::Scale(c, a) => (Op::Scale(c.clone()), vec![a]),
            Term::Cmp(op, a, b) => (Op::Cmp(*op), vec![a, b]),
            Term::Not(a) => (Op::Not, vec![a]),
            Term::And(items) => (Op::And, items.iter().collect()),
            Term::Or(items) => (Op::Or, items.iter().collect()),
            Term::Implies(a, b) => (Op::Implies, vec![a, b]),
            Term::Ite(c, t, e) => (Op::Ite, vec![c, t, e]),
            Term::Element(table, index) => {
                let min = table.iter().min().cloned().unwrap_or_else(S::zero);
                let max = table.iter().max().cloned().unwrap_or_else(S::zero);
                (
                    Op::Element {
                        table: table.clone(),
                        min,
                        max,
                    },
                    vec![index],
                )
            }
        };
        let ids: Vec<u32> = kids.into_iter().map(|k| self.push(k)).collect();
        let first = self.children.len() as u32;
        self.children.extend(ids.iter().copied());
        self.nodes.push(Node {
            op,
            first,
            len: ids.len() as u32,
        });
        (self.nodes.len() - 1) as u32
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Evaluates every node into `out` (resized as needed).
    pub fn eval_all(&self, doms: &Domains, out: &mut Vec<AVal<S>>) {
        out.clear();
        for i in 0..self.nodes.len() {
            let v = self.eval_node(i, doms, None, out);
            out.push(v);
        }
    }

    /// Re-evaluates only the nodes depending on `vars[slot]`, with that
    /// variable pinned to `value`. `scratch` must hold a full evaluation on
    /// entry; afterwards it holds the pinned evaluation.
    pub fn eval_pinned(&self, slot: usize, value: i64, doms: &Domains, scratch: &mut [AVal<S>]) -> u8 {
        let pin = Some((self.vars[slot], value));
        for &i in &self.paths[slot] {
            let v = self.eval_node(i as usize, doms, pin, scratch);
            scratch[i as usize] = v;
        }
        scratch[self.root()].mask()
    }

    /// Copies the nodes that depend on `vars[slot]` back from `base`.
    pub fn restore(&self, slot: usize, base: &[AVal<S>], scratch: &mut [AVal<S>]) {
        for &i in &self.paths[slot] {
            scratch[i as usize] = base[i as usize].clone();
        }
    }

    fn eval_node(&self, i: usize, doms: &Domains, pin: Option<(usize, i64)>, vals: &[AVal<S>]) -> AVal<S> {
        let node = &self.nodes[i];
        let kids = &self.children[node.first as usize..(node.first + node.len) as usize];
        let kid = |k: usize| &vals[kids[k] as usize];
        match &node.op {
            Op::Var(v) => match pin {
                Some((pv, x)) if pv == *v => AVal::point(S::from_int(x)),
                _ => AVal::Num {
                    ok: true,
                    err: false,
                    lo: S::from_int(doms.min(*v)),
                    hi: S::from_int(doms.max(*v)),
                },
            },
            Op::Const(c) => AVal::point(c.clone()),
            Op::Bool(b) => AVal::Bool(if *b { T } else { F }),
            Op::Add => {
                let mut ok = true;
                let mut err = false;
                let mut lo = S::zero();
                let mut hi = S::zero();
                for k in 0..kids.len() {
                    let (kok, kerr, klo, khi) = num(kid(k));
                    ok &= kok;
                    err |= kerr;
                    if ok {
                        lo = lo + klo.clone();
                        hi = hi + khi.clone();
                    }
                }
                AVal::Num { ok, err, lo, hi }
            }
            Op::Sub => {
                let (aok, aerr, alo, ahi) = num(kid(0));
                let (bok, berr, blo, bhi) = num(kid(1));
                let ok = aok && bok;
                let (lo, hi) = if ok {
                    (alo.clone() - bhi.clone(), ahi.clone() - blo.clone())
                } else {
                    (S::zero(), S::zero())
                };
                AVal::Num {
                    ok,
                    err: aerr || berr,
                    lo,
                    hi,
                }
            }
            Op::Neg => {
                let (ok, err, lo, hi) = num(kid(0));
                AVal::Num {
                    ok,
                    err,
                    lo: -hi.clone(),
                    hi: -lo.clone(),
                }
            }
            Op::Scale(c) => {
                let (ok, err, lo, hi) = num(kid(0));
                let a = c.clone() * lo.clone();
                let b = c.clone() * hi.clone();
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                AVal::Num { ok, err, lo, hi }
            }
            Op::Cmp(op) => {
                let (aok, aerr, alo, ahi) = num(kid(0));
                let (bok, berr, blo, bhi) = num(kid(1));
                let mut m = if aerr || berr { E } else { 0 };
                if aok && bok {
                    m |= compare(*op, alo, ahi, blo, bhi);
                }
                AVal::Bool(m)
            }
            Op::Not => AVal::Bool(negate(kid(0).mask())),
            Op::And => AVal::Bool(junction((0..kids.len()).map(|k| kid(k).mask()), F, T)),
            Op::Or => AVal::Bool(junction((0..kids.len()).map(|k| kid(k).mask()), T, F)),
            Op::Implies => {
                let a = negate(kid(0).mask());
                AVal::Bool(junction([a, kid(1).mask()].into_iter(), T, F))
            }
            Op::Ite => ite(kid(0).mask(), kid(1), kid(2)),
            Op::Element { table, min, max } => element(table, min, max, kid(0)),
        }
    }
}

fn num<S>(v: &AVal<S>) -> (bool, bool, &S, &S) {
    match v {
        AVal::Num { ok, err, lo, hi } => (*ok, *err, lo, hi),
        AVal::Bool(_) => unreachable!("numeric node expected"),
    }
}

fn negate(m: u8) -> u8 {
    let mut out = m & E;
    if m & T != 0 {
        out |= F;
    }
    if m & F != 0 {
        out |= T;
    }
    out
}

/// `dominant` is the value that decides the connective on its own (false
/// for `and`, true for `or`); `neutral` is the other one.
fn junction(masks: impl Iterator<Item = u8>, dominant: u8, neutral: u8) -> u8 {
    let mut any_dominant = false;
    let mut all_neutral = true;
    let mut all_non_dominant = true;
    let mut any_err = false;
    let mut empty = false;
    for m in masks {
        if m == 0 {
            empty = true;
        }
        any_dominant |= m & dominant != 0;
        all_neutral &= m & neutral != 0;
        all_non_dominant &= m & (neutral | E) != 0;
        any_err |= m & E != 0;
    }
    if empty {
        return 0;
    }
    let mut out = 0;
    if any_dominant {
        out |= dominant;
    }
    if all_neutral {
        out |= neutral;
    }
    if all_non_dominant && any_err {
        out |= E;
    }
    out
}

fn compare<S: Scalar>(op: CmpOp, alo: &S, ahi: &S, blo: &S, bhi: &S) -> u8 {
    let can_eq = alo <= bhi && blo <= ahi;
    let must_eq = alo == ahi && blo == bhi && alo == blo;
    let (t, f) = match op {
        CmpOp::Eq => (can_eq, !must_eq),
        CmpOp::Ne => (!must_eq, can_eq),
        CmpOp::Lt => (alo < bhi, ahi >= blo),
        CmpOp::Le => (alo <= bhi, ahi > blo),
        CmpOp::Gt => (ahi > blo, alo <= bhi),
        CmpOp::Ge => (ahi >= blo, alo < bhi),
    };
    (if t { T } else { 0 }) | (if f { F } else { 0 })
}

fn ite<S: Scalar>(c: u8, a: &AVal<S>, b: &AVal<S>) -> AVal<S> {
    let take_a = c & T != 0;
    let take_b = c & F != 0;
    let cond_err = c & E != 0;
    let numeric = matches!(a, AVal::Num { .. }) && matches!(b, AVal::Num { .. });
    if !numeric {
        let mut m = if cond_err { E } else { 0 };
        if take_a {
            m |= a.mask();
        }
        if take_b {
            m |= b.mask();
        }
        return AVal::Bool(m);
    }
    let mut ok = false;
    let mut err = cond_err;
    let mut lo: Option<S> = None;
    let mut hi: Option<S> = None;
    for (taken, v) in [(take_a, a), (take_b, b)] {
        if !taken {
            continue;
        }
        let (vok, verr, vlo, vhi) = num(v);
        err |= verr;
        if vok {
            ok = true;
            lo = Some(match lo {
                Some(l) if l <= *vlo => l,
                _ => vlo.clone(),
            });
            hi = Some(match hi {
                Some(h) if h >= *vhi => h,
                _ => vhi.clone(),
            });
        }
    }
    AVal::Num {
        ok,
        err,
        lo: lo.unwrap_or_else(S::zero),
        hi: hi.unwrap_or_else(S::zero),
    }
}

fn element<S: Scalar>(table: &Arc<[S]>, min: &S, max: &S, index: &AVal<S>) -> AVal<S> {
    let (ok, err, lo, hi) = num(index);
    if !ok {
        return AVal::Num {
            ok: false,
            err,
            lo: S::zero(),
            hi: S::zero(),
        };
    }
    let (Some(lo), Some(hi)) = (lo.as_integer(), hi.as_integer()) else {
        // index bounds are integral for well-sorted programs
        return AVal::Num {
            ok: true,
            err: true,
            lo: min.clone(),
            hi: max.clone(),
        };
    };
    let len = table.len() as i64;
    let err = err || lo < 0 || hi >= len;
    let a = lo.max(0);
    let b = hi.min(len - 1);
    if a > b {
        let mut v = AVal::failed();
        if let AVal::Num { err: e, .. } = &mut v {
            *e = err;
        }
        return v;
    }
    if a == 0 && b == len - 1 {
        return AVal::Num {
            ok: true,
            err,
            lo: min.clone(),
            hi: max.clone(),
        };
    }
    let slice = &table[a as usize..=b as usize];
    AVal::Num {
        ok: true,
        err,
        lo: slice.iter().min().cloned().unwrap_or_else(S::zero),
        hi: slice.iter().max().cloned().unwrap_or_else(S::zero),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn junction_follows_kleene_tables() {
        // and(false, error) is false
        assert_eq!(junction([F, E].into_iter(), F, T), F);
        // and(true, error) is error
        assert_eq!(junction([T, E].into_iter(), F, T), E);
        // or(true, error) is true
        assert_eq!(junction([T, E].into_iter(), T, F), T);
        // unknown and: every outcome reachable
        assert_eq!(junction([T | F, T | E].into_iter(), F, T), T | F | E);
    }

    #[test]
    fn comparisons_on_intervals() {
        let m = compare(CmpOp::Lt, &0i64, &1, &2, &5);
        assert_eq!(m, T);
        let m = compare(CmpOp::Lt, &0i64, &2, &2, &5);
        assert_eq!(m, T | F);
        let m = compare(CmpOp::Eq, &3i64, &3, &3, &3);
        assert_eq!(m, T);
        let m = compare(CmpOp::Ne, &0i64, &1, &1, &1);
        assert_eq!(m, T | F);
    }
}
