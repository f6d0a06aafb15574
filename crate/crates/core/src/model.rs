//! A model: variables, posted constraints, branching order and an optional
//! objective, ready to hand to [`crate::search`].

use std::time::Duration;

use smallvec::SmallVec;
use thiserror::Error;

use crate::constraints::BoolMode;
use crate::domain::{DomainError, Value, VarId, VariableStore};
use crate::propagate::{Engine, PropId, Propagator, Space};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("{0} needs at least one term")]
    Empty(&'static str),
    #[error("{what} needs at least {min} variables, got {got}")]
    TooFew { what: &'static str, min: usize, got: usize },
    #[error("zero coefficient on {0}")]
    ZeroCoefficient(VarId),
    #[error("linear expression may overflow 64-bit arithmetic")]
    Overflow,
    #[error("lex operands have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("{0} is not a Boolean variable")]
    NotBoolean(VarId),
    #[error("{0} is not a 0/1 variable")]
    NotZeroOne(VarId),
    #[error("{0} is not an integer variable")]
    NotInteger(VarId),
    #[error("priority {0} out of range 0..8")]
    Priority(u8),
    #[error("invalid instance: {0}")]
    Instance(String),
}

/// Which propagator family a posted constraint belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstraintKind {
    Linear,
    BoolSum,
    AllDifferent,
    NotEqualConst,
    EqualConst,
    LessEq,
    BoolAnd,
    Lex,
    ObjectiveBound,
}

/// One counted constraint and the propagator that implements it.
#[derive(Debug, Clone)]
pub struct ConstraintRecord {
    pub kind: ConstraintKind,
    pub prop: PropId,
}

/// Default priorities per propagator family; lower runs first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Priorities {
    /// Unary and binary propagators, and `z = x /\ y`.
    pub cheap: u8,
    /// Linear and Boolean sums.
    pub linear: u8,
    /// alldifferent and lex.
    pub global: u8,
}

impl Default for Priorities {
    fn default() -> Self {
        Self { cheap: 2, linear: 4, global: 6 }
    }
}

#[derive(Debug, Default)]
pub struct Model {
    pub(crate) space: Space,
    branch: Vec<VarId>,
    objective: Option<VarId>,
    constraints: Vec<ConstraintRecord>,
    priorities: Priorities,
    build_time: Duration,
}

impl Model {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn store(&self) -> &VariableStore {
        &self.space.store
    }

    pub fn engine(&self) -> &Engine {
        &self.space.engine
    }

    pub fn into_space(self) -> Space {
        self.space
    }

    pub fn new_int_var(&mut self, lo: Value, hi: Value) -> Result<VarId, ModelError> {
        Ok(self.space.store.new_int_var(lo, hi)?)
    }

    pub fn new_bool_var(&mut self) -> VarId {
        self.space.store.new_bool_var()
    }

    /// A 0/1 variable in the requested representation.
    pub fn new_boolean(&mut self, mode: BoolMode) -> VarId {
        match mode {
            BoolMode::NativeBool => self.new_bool_var(),
            BoolMode::IntZeroOne => self.new_int_var(0, 1).expect("0..1 is a valid domain"),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.space.store.num_vars()
    }

    /// Number of posted constraints, as counted by the posting calls.
    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn constraints(&self) -> &[ConstraintRecord] {
        &self.constraints
    }

    pub fn priorities(&self) -> Priorities {
        self.priorities
    }

    pub fn set_priorities(&mut self, priorities: Priorities) {
        self.priorities = priorities;
    }

    pub fn branch_order(&self) -> &[VarId] {
        &self.branch
    }

    pub fn set_branch_order(&mut self, vars: Vec<VarId>) {
        self.branch = vars;
    }

    pub fn objective(&self) -> Option<VarId> {
        self.objective
    }

    pub fn set_objective(&mut self, var: VarId) {
        self.objective = Some(var);
    }

    pub fn build_time(&self) -> Duration {
        self.build_time
    }

    pub fn set_build_time(&mut self, d: Duration) {
        self.build_time = d;
    }

    /// Posts an arbitrary propagator as one counted constraint.
    pub fn post_propagator(
        &mut self,
        kind: ConstraintKind,
        prop: Box<dyn Propagator>,
        priority: u8,
    ) -> Result<PropId, ModelError> {
        if priority as usize >= crate::propagate::PRIORITY_LEVELS {
            return Err(ModelError::Priority(priority));
        }
        let prop = self.space.engine.add(prop, priority, false);
        self.constraints.push(ConstraintRecord { kind, prop });
        Ok(prop)
    }

    pub(crate) fn post_all(
        &mut self,
        kind: ConstraintKind,
        props: impl IntoIterator<Item = Box<dyn Propagator>>,
        priority: u8,
    ) -> Result<usize, ModelError> {
        let ids: SmallVec<[PropId; 2]> = props
            .into_iter()
            .map(|p| self.post_propagator(kind, p, priority))
            .collect::<Result<_, _>>()?;
        Ok(ids.len())
    }
}
