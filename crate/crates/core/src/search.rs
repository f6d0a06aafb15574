//! Depth-first search with a static variable order and binary branching.
//!
//! At every node the first unfixed variable `x` of the branch order is
//! selected. The left child assigns `x = min(x)` and the right child removes
//! that value. Each applied decision is followed by propagation to fixpoint.
//!
//! `nodes` counts applied decisions and `backtracks` counts nodes whose
//! propagation failed. Retreating after a solution is not a backtrack.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::constraints::UpperBound;
use crate::domain::{Action, NoRecord, Value, VarId};
use crate::model::Model;
use crate::propagate::{Failure, QueuePolicy, Space};
use crate::restore::{Decision, RestoreMode, RestoreStats, Restorer};

/// Priority given to the objective bound posted by branch and bound.
const BOUND_PRIORITY: u8 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SolveMode {
    /// Stop at the first solution.
    #[default]
    First,
    /// Exhaust the tree.
    All,
}

/// How branch and bound enforces `objective < incumbent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BnBMode {
    /// Add a bound propagator after each solution.
    #[default]
    PostConstraint,
    /// Narrow the objective's upper bound directly in the store.
    TightenBound,
}

impl BnBMode {
    pub fn as_str(self) -> &'static str {
        match self {
            BnBMode::PostConstraint => "post",
            BnBMode::TightenBound => "tighten",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SearchConfig {
    pub restore: RestoreMode,
    pub queue: QueuePolicy,
    pub bnb: BnBMode,
    /// Stop after this many nodes; the result is then marked incomplete.
    pub node_limit: Option<u64>,
}

impl SearchConfig {
    pub fn new(restore: RestoreMode, queue: QueuePolicy) -> Self {
        Self { restore, queue, ..Self::default() }
    }

    pub fn with_bnb(mut self, bnb: BnBMode) -> Self {
        self.bnb = bnb;
        self
    }

    pub fn with_node_limit(mut self, limit: u64) -> Self {
        self.node_limit = Some(limit);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SearchStats {
    pub nodes: u64,
    pub backtracks: u64,
    pub solutions: u64,
    pub max_depth: u32,
    pub propagations: u64,
    /// Model construction plus the root fixpoint.
    pub setup: Duration,
    /// Everything after the root fixpoint.
    pub solve: Duration,
    pub restore: RestoreStats,
}

impl SearchStats {
    pub fn setup_ms(&self) -> f64 {
        self.setup.as_secs_f64() * 1e3
    }

    pub fn solve_ms(&self) -> f64 {
        self.solve.as_secs_f64() * 1e3
    }

    /// Nodes per second of solve time.
    pub fn nps(&self) -> f64 {
        self.nodes as f64 / self.solve.as_secs_f64().max(1e-9)
    }

    /// The fields that must not depend on how the search is executed.
    pub fn trajectory(&self) -> (u64, u64, u64) {
        (self.nodes, self.backtracks, self.solutions)
    }

    /// Bytes copied into snapshots per node.
    pub fn bytes_per_node(&self) -> f64 {
        self.restore.bytes_copied as f64 / self.nodes.max(1) as f64
    }
}

/// Values of the branched variables, in branch order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Solution {
    pub values: Vec<Value>,
}

impl Solution {
    fn capture(space: &Space, order: &[VarId]) -> Self {
        let values = order
            .iter()
            .map(|&x| space.store.value(x).expect("branched variables are fixed in a solution"))
            .collect();
        Self { values }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub solutions: Vec<Solution>,
    pub stats: SearchStats,
    /// False when the node limit cut the search short.
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub best: Solution,
    pub value: Value,
    pub stats: SearchStats,
    /// True when optimality was proven.
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error("the model has no objective")]
    NoObjective,
    #[error("no solution exists")]
    Infeasible(SearchStats),
    #[error("node limit reached before any solution was found")]
    LimitReached(SearchStats),
}

/// Points at which a [`SearchObserver`] is called.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchEvent {
    /// The root fixpoint succeeded.
    Root,
    /// A node at `depth` reached its fixpoint.
    Node { depth: u32 },
    /// A node at `depth` failed.
    Failed { depth: u32 },
    /// The store was restored to the node at `depth`.
    Restored { depth: u32 },
    /// All branched variables are fixed.
    Solution { depth: u32 },
}

/// Hook for inspecting the space while a search runs.
pub trait SearchObserver {
    fn notify(&mut self, event: SearchEvent, space: &Space);
}

impl SearchObserver for () {
    fn notify(&mut self, _: SearchEvent, _: &Space) {}
}

pub fn solve(model: Model, mode: SolveMode, config: &SearchConfig) -> SearchOutcome {
    solve_observed(model, mode, config, &mut ())
}

pub fn solve_observed(
    model: Model,
    mode: SolveMode,
    config: &SearchConfig,
    observer: &mut dyn SearchObserver,
) -> SearchOutcome {
    let mut search = Search::new(model, config, None);
    let complete = search.run(observer, |s| {
        s.solutions.push(Solution::capture(&s.space, &s.order));
        mode == SolveMode::All
    });
    SearchOutcome { solutions: search.solutions, stats: search.stats, complete }
}

/// Restart-free branch and bound on the model's objective.
pub fn minimize(model: Model, config: &SearchConfig) -> Result<Optimum, SearchError> {
    minimize_observed(model, config, &mut ())
}

pub fn minimize_observed(
    model: Model,
    config: &SearchConfig,
    observer: &mut dyn SearchObserver,
) -> Result<Optimum, SearchError> {
    let objective = model.objective().ok_or(SearchError::NoObjective)?;
    let mut search = Search::new(model, config, Some(objective));
    let complete = search.run(observer, |s| {
        let value = s.space.store.value(objective).expect("objective fixed in a solution");
        s.solutions.clear();
        s.solutions.push(Solution::capture(&s.space, &s.order));
        s.best = Some(value);
        s.improve(objective, value);
        true
    });
    let stats = search.stats;
    match (search.solutions.pop(), search.best) {
        (Some(best), Some(value)) => Ok(Optimum { value, best, stats, complete }),
        _ if complete => Err(SearchError::Infeasible(stats)),
        _ => Err(SearchError::LimitReached(stats)),
    }
}

struct Search {
    space: Space,
    restorer: Restorer,
    order: Vec<VarId>,
    bnb: BnBMode,
    objective: Option<VarId>,
    /// Largest objective value still allowed, in TightenBound mode.
    bound: Option<Value>,
    best: Option<Value>,
    node_limit: Option<u64>,
    solutions: Vec<Solution>,
    stats: SearchStats,
    build_time: Duration,
}

impl Search {
    fn new(model: Model, config: &SearchConfig, objective: Option<VarId>) -> Self {
        let build_time = model.build_time();
        let order = model.branch_order().to_vec();
        let mut space = model.into_space();
        space.engine.set_policy(config.queue);
        Self {
            space,
            restorer: Restorer::new(config.restore),
            order,
            bnb: config.bnb,
            objective,
            bound: None,
            best: None,
            node_limit: config.node_limit,
            solutions: Vec::new(),
            stats: SearchStats::default(),
            build_time,
        }
    }

    fn improve(&mut self, objective: VarId, value: Value) {
        match self.bnb {
            BnBMode::PostConstraint => {
                let prop = UpperBound { x: objective, ub: value - 1 };
                self.space.engine.add(Box::new(prop), BOUND_PRIORITY, true);
            }
            BnBMode::TightenBound => self.bound = Some(value - 1),
        }
    }

    fn select(&self) -> Option<(VarId, Value)> {
        self.order
            .iter()
            .find(|&&x| !self.space.store.is_fixed(x))
            .map(|&x| (x, self.space.store.min(x)))
    }

    /// Opens a child node, applies `decision` plus the incumbent bound and
    /// propagates.
    fn descend(&mut self, decision: Decision) -> Result<(), Failure> {
        self.restorer.open_node(&mut self.space.store, decision);
        self.stats.nodes += 1;
        self.stats.max_depth = self.stats.max_depth.max(self.space.store.depth());
        if let (Some(ub), Some(obj)) = (self.bound, self.objective) {
            self.space.narrow(obj, Action::TightenMax(ub), &mut self.restorer)?;
        }
        self.space.apply(decision, &mut self.restorer)
    }

    fn limit_hit(&self) -> bool {
        self.node_limit.is_some_and(|l| self.stats.nodes >= l)
    }

    /// Runs the search. `on_solution` returns whether to continue. Returns
    /// whether the tree was exhausted or stopped by `on_solution`, as opposed
    /// to cut by the node limit.
    fn run(
        &mut self,
        observer: &mut dyn SearchObserver,
        mut on_solution: impl FnMut(&mut Self) -> bool,
    ) -> bool {
        let start = Instant::now();
        let root = self.space.propagate(&mut NoRecord);
        let solve_start = Instant::now();
        self.stats.setup = self.build_time + (solve_start - start);
        let complete = match root {
            Err(Failure) => true,
            Ok(()) => {
                observer.notify(SearchEvent::Root, &self.space);
                self.explore(observer, &mut on_solution)
            }
        };
        self.stats.solve = solve_start.elapsed();
        self.stats.propagations = self.space.engine.propagations();
        self.stats.restore = self.restorer.stats();
        complete
    }

    fn explore(
        &mut self,
        observer: &mut dyn SearchObserver,
        on_solution: &mut impl FnMut(&mut Self) -> bool,
    ) -> bool {
        loop {
            // The current node is at fixpoint.
            let depth = self.space.store.depth();
            match self.select() {
                None => {
                    self.stats.solutions += 1;
                    observer.notify(SearchEvent::Solution { depth }, &self.space);
                    if !on_solution(self) {
                        return true;
                    }
                }
                Some((x, v)) => {
                    if self.limit_hit() {
                        return false;
                    }
                    match self.descend(Decision::Assign(x, v)) {
                        Ok(()) => {
                            observer.notify(SearchEvent::Node { depth: depth + 1 }, &self.space);
                            continue;
                        }
                        Err(Failure) => {
                            self.stats.backtracks += 1;
                            observer.notify(SearchEvent::Failed { depth: depth + 1 }, &self.space);
                        }
                    }
                }
            }
            match self.retreat(observer) {
                Some(true) => {}
                Some(false) => return false,
                None => return true,
            }
        }
    }

    /// Backtracks to the deepest open left branch and takes its right
    /// branch, repeating on failure. Returns `None` when the tree is
    /// exhausted, `Some(false)` on hitting the node limit.
    fn retreat(&mut self, observer: &mut dyn SearchObserver) -> Option<bool> {
        loop {
            let k = self.restorer.frames().iter().rposition(|f| f.decision.is_left())?;
            let Decision::Assign(x, v) = self.restorer.frames()[k].decision else {
                unreachable!("left branches assign")
            };
            self.restorer.backtrack_to(&mut self.space, k as u32);
            observer.notify(SearchEvent::Restored { depth: k as u32 }, &self.space);
            if self.limit_hit() {
                return Some(false);
            }
            self.space.engine.schedule_dynamic();
            match self.descend(Decision::Exclude(x, v)) {
                Ok(()) => {
                    observer.notify(SearchEvent::Node { depth: k as u32 + 1 }, &self.space);
                    return Some(true);
                }
                Err(Failure) => {
                    self.stats.backtracks += 1;
                    observer.notify(SearchEvent::Failed { depth: k as u32 + 1 }, &self.space);
                }
            }
        }
    }
}
