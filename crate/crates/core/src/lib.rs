//! A finite-domain constraint solver built for controlled experiments.
//!
//! Domains live in one contiguous word region ([`domain::VariableStore`]) so
//! that search can restore state by trailing, by copying the region, or by
//! copying periodically and recomputing the rest ([`restore`]). Propagation
//! is event driven with a configurable queue ([`propagate`]). The
//! [`models`] module builds the benchmark problem classes and checks their
//! solutions independently of the solver.

pub mod constraints;
pub mod domain;
pub mod model;
pub mod models;
pub mod propagate;
pub mod restore;
pub mod search;

pub use constraints::{BoolMode, LinearTerm, Rel, SumMode};
pub use domain::{BoolState, DomainError, EventClass, Value, VarId, VarKind, VariableStore};
pub use model::{Model, ModelError};
pub use propagate::{QueuePolicy, Space};
pub use restore::{Decision, RestoreMode, RestoreStats};
pub use search::{
    minimize, solve, BnBMode, Optimum, SearchConfig, SearchError, SearchOutcome, SearchStats,
    SolveMode, Solution,
};
