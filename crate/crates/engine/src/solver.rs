use std::collections::{BTreeSet, VecDeque};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::absint::{AVal, Compiled, T};
use crate::domain::{Domains, Layout};
use crate::eval::{evaluate_with, holds, Value};
use crate::program::{ConstraintProgram, Direction, Model, ProgramError, SolveResult};
use crate::scalar::Scalar;
use crate::term::{CmpOp, Term};

pub const DEFAULT_TIME_LIMIT: Duration = Duration::from_secs(10);

/// Values of a variable are filtered one by one only while its domain is at
/// most this large; wider domains are left to branching.
const FILTER_LIMIT: u64 = 256;

#[derive(Debug, Clone)]
pub struct CheckOptions {
    pub time_limit: Duration,
    /// Raising this flag makes a running check return `Timeout`.
    pub cancel: Option<Arc<AtomicBool>>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            time_limit: DEFAULT_TIME_LIMIT,
            cancel: None,
        }
    }
}

impl CheckOptions {
    pub fn with_limit(time_limit: Duration) -> Self {
        CheckOptions {
            time_limit,
            cancel: None,
        }
    }
}

/// Decides the program. See [`SolveResult`] for the possible outcomes.
///
/// With an objective the search continues past the first model and keeps
/// only strictly improving ones, so a `Sat` answer is optimal within the
/// declared domains. Running out of time during that phase yields `Timeout`.
pub fn check<S: Scalar>(
    program: &ConstraintProgram<S>,
    options: &CheckOptions,
) -> Result<SolveResult<S>, ProgramError> {
    check_with_stats(program, options).map(|(result, _)| result)
}

/// Counters describing the work done by one check.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub nodes: u64,
    pub failures: u64,
    pub solutions: u64,
}

/// Like [`check`], also returning search statistics.
pub fn check_with_stats<S: Scalar>(
    program: &ConstraintProgram<S>,
    options: &CheckOptions,
) -> Result<(SolveResult<S>, Stats), ProgramError> {
    program.validate()?;
    let mut search = Search::new(program, options);
    let result = search.run();
    Ok((result, search.stats))
}

#[derive(Clone)]
struct State {
    doms: Domains,
    entailed: Vec<bool>,
}

enum Step {
    Done,
    Stop,
}

struct Search<'p, S> {
    program: &'p ConstraintProgram<S>,
    layout: Layout,
    compiled: Vec<Compiled<S>>,
    watchers: Vec<Vec<usize>>,
    bound: Option<Compiled<S>>,
    used: Vec<bool>,
    best: Option<(Vec<i64>, Option<S>)>,
    deadline: Instant,
    started: Instant,
    cancel: Option<Arc<AtomicBool>>,
    timed_out: bool,
    stats: Stats,
    base: Vec<AVal<S>>,
    scratch: Vec<AVal<S>>,
}

impl<'p, S: Scalar> Search<'p, S> {
    fn new(program: &'p ConstraintProgram<S>, options: &CheckOptions) -> Self {
        let bounds: Vec<(i64, i64)> = program.vars().iter().map(|v| (v.lo, v.hi)).collect();
        let layout = Layout::new(&bounds);
        let compiled: Vec<Compiled<S>> = program
            .assertions()
            .iter()
            .map(|a| Compiled::new(&a.formula))
            .collect();
        let mut watchers = vec![Vec::new(); bounds.len()];
        for (i, c) in compiled.iter().enumerate() {
            for &v in &c.vars {
                watchers[v].push(i);
            }
        }
        let started = Instant::now();
        Search {
            program,
            layout,
            compiled,
            watchers,
            bound: None,
            used: vec![false; program.assertions().len()],
            best: None,
            deadline: started.checked_add(options.time_limit).unwrap_or(started + Duration::from_secs(86_400 * 365)),
            started,
            cancel: options.cancel.clone(),
            timed_out: false,
            stats: Stats::default(),
            base: Vec::new(),
            scratch: Vec::new(),
        }
    }

    fn run(&mut self) -> SolveResult<S> {
        let root = State {
            doms: self.layout.initial(),
            entailed: vec![false; self.compiled.len()],
        };
        let all: Vec<usize> = (0..self.compiled.len()).collect();
        let _ = self.dfs(root, all);
        if self.timed_out {
            return SolveResult::Timeout {
                elapsed: self.started.elapsed(),
            };
        }
        match self.best.take() {
            Some((values, value)) => {
                let names = self.program.vars().iter().map(|v| v.name.clone()).collect();
                let objective_value = self.program.objective().and(value);
                SolveResult::Sat {
                    model: Model::new(names, values),
                    objective_value,
                }
            }
            None => {
                let core: BTreeSet<String> = self
                    .program
                    .assertions()
                    .iter()
                    .zip(&self.used)
                    .filter(|(_, used)| **used)
                    .map(|(a, _)| a.label.clone())
                    .collect();
                SolveResult::Unsat { core }
            }
        }
    }

    fn out_of_time(&mut self) -> bool {
        if self.timed_out {
            return true;
        }
        let cancelled = self
            .cancel
            .as_ref()
            .is_some_and(|c| c.load(Ordering::Relaxed));
        if cancelled || Instant::now() >= self.deadline {
            self.timed_out = true;
        }
        self.timed_out
    }

    fn dfs(&mut self, mut state: State, seeds: Vec<usize>) -> Step {
        self.stats.nodes += 1;
        if self.out_of_time() {
            return Step::Stop;
        }
        if !self.propagate(&mut state, seeds) || !self.check_bound(&mut state) {
            self.stats.failures += 1;
            return Step::Done;
        }
        let pick = (0..self.layout_len())
            .filter(|&v| !state.doms.is_fixed(v))
            .min_by_key(|&v| (state.doms.size(v), v));
        let Some(var) = pick else {
            return self.leaf(&state);
        };
        for value in state.doms.values(&self.layout, var) {
            let mut child = state.clone();
            child.doms.assign(&self.layout, var, value);
            let seeds = self.watchers[var].clone();
            if let Step::Stop = self.dfs(child, seeds) {
                return Step::Stop;
            }
        }
        Step::Done
    }

    fn layout_len(&self) -> usize {
        self.program.vars().len()
    }

    fn leaf(&mut self, state: &State) -> Step {
        let values: Vec<i64> = (0..self.layout_len()).map(|v| state.doms.min(v)).collect();
        for (i, a) in self.program.assertions().iter().enumerate() {
            if !matches!(holds(&values, &a.formula), Ok(true)) {
                debug_assert!(false, "abstract evaluation accepted a violated assertion `{}`", a.label);
                self.used[i] = true;
                return Step::Done;
            }
        }
        self.stats.solutions += 1;
        let Some(objective) = self.program.objective() else {
            self.best = Some((values, None));
            return Step::Stop;
        };
        // A model whose objective is undefined (an out-of-range element) is
        // kept only until a model with a defined value turns up.
        let Ok(Value::Num(value)) = evaluate_with(&values, &objective.term) else {
            if self.best.is_none() {
                self.best = Some((values, None));
            }
            return Step::Done;
        };
        let improves = match &self.best {
            Some((_, Some(best))) => match objective.direction {
                Direction::Minimize => value < *best,
                Direction::Maximize => value > *best,
            },
            _ => true,
        };
        if improves {
            let op = match objective.direction {
                Direction::Minimize => CmpOp::Lt,
                Direction::Maximize => CmpOp::Gt,
            };
            let bound = Term::Cmp(op, Box::new(objective.term.clone()), Box::new(Term::Const(value.clone())));
            self.bound = Some(Compiled::new(&bound));
            self.best = Some((values, Some(value)));
        }
        Step::Done
    }

    /// Runs every queued assertion to a fixpoint. Returns false on a wipe-out.
    fn propagate(&mut self, state: &mut State, seeds: Vec<usize>) -> bool {
        let mut queued = vec![false; self.compiled.len()];
        let mut queue = VecDeque::with_capacity(seeds.len());
        for a in seeds {
            if !queued[a] && !state.entailed[a] {
                queued[a] = true;
                queue.push_back(a);
            }
        }
        while let Some(a) = queue.pop_front() {
            queued[a] = false;
            match self.revise(a, state) {
                Revision::Failed => {
                    self.used[a] = true;
                    return false;
                }
                Revision::Entailed => state.entailed[a] = true,
                Revision::Pruned(changed) => {
                    if !changed.is_empty() {
                        self.used[a] = true;
                    }
                    for v in changed {
                        for &b in &self.watchers[v] {
                            if !queued[b] && !state.entailed[b] {
                                queued[b] = true;
                                queue.push_back(b);
                            }
                        }
                    }
                }
            }
        }
        true
    }

    fn revise(&mut self, a: usize, state: &mut State) -> Revision {
        let compiled = &self.compiled[a];
        let mut base = std::mem::take(&mut self.base);
        let mut scratch = std::mem::take(&mut self.scratch);
        let outcome = filter(compiled, &self.layout, &mut state.doms, &mut base, &mut scratch);
        self.base = base;
        self.scratch = scratch;
        outcome
    }

    /// Applies the branch-and-bound cut once a model is known.
    fn check_bound(&mut self, state: &mut State) -> bool {
        let Some(bound) = self.bound.take() else {
            return true;
        };
        let mut base = std::mem::take(&mut self.base);
        let mut scratch = std::mem::take(&mut self.scratch);
        let outcome = filter(&bound, &self.layout, &mut state.doms, &mut base, &mut scratch);
        self.base = base;
        self.scratch = scratch;
        self.bound = Some(bound);
        match outcome {
            Revision::Failed => false,
            Revision::Entailed => true,
            Revision::Pruned(changed) => {
                if changed.is_empty() {
                    return true;
                }
                let mut seeds = Vec::new();
                for v in changed {
                    seeds.extend(self.watchers[v].iter().copied());
                }
                seeds.sort_unstable();
                seeds.dedup();
                self.propagate(state, seeds)
            }
        }
    }
}

enum Revision {
    Failed,
    Entailed,
    Pruned(Vec<usize>),
}

fn filter<S: Scalar>(
    compiled: &Compiled<S>,
    layout: &Layout,
    doms: &mut Domains,
    base: &mut Vec<AVal<S>>,
    scratch: &mut Vec<AVal<S>>,
) -> Revision {
    compiled.eval_all(doms, base);
    let root = base[compiled.root()].mask();
    if root & T == 0 {
        return Revision::Failed;
    }
    if root == T {
        return Revision::Entailed;
    }
    scratch.clear();
    scratch.extend(base.iter().cloned());
    let mut changed = Vec::new();
    for slot in 0..compiled.vars.len() {
        let var = compiled.vars[slot];
        let size = doms.size(var);
        if size <= 1 || size > FILTER_LIMIT {
            continue;
        }
        let mut removed = false;
        for value in doms.values(layout, var) {
            if compiled.eval_pinned(slot, value, doms, scratch) & T == 0 {
                doms.remove(layout, var, value);
                removed = true;
            }
        }
        compiled.restore(slot, base, scratch);
        if removed {
            if doms.size(var) == 0 {
                return Revision::Failed;
            }
            changed.push(var);
        }
    }
    Revision::Pruned(changed)
}
