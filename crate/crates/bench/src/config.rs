use fdlab::models::{Instance, InstanceError};
use fdlab::propagate::QueuePolicy;
use fdlab::restore::RestoreModeError;
use fdlab::{BnBMode, ModelError, RestoreMode, SolveMode};
use thiserror::Error;

/// Default number of repetitions per configuration.
pub const DEFAULT_RUNS: usize = 5;

/// One cell of an experiment matrix. Everything that influences the search
/// trajectory is in here; repetitions only vary timings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RunConfig {
    pub instance: Instance,
    pub restore: RestoreMode,
    pub queue: QueuePolicy,
    /// Used by optimisation classes only.
    pub bnb: BnBMode,
    /// Used by satisfaction classes only.
    pub solve_mode: SolveMode,
    pub runs: usize,
    pub node_limit: Option<u64>,
}

impl RunConfig {
    pub fn new(instance: Instance) -> Self {
        Self {
            instance,
            restore: RestoreMode::Trail,
            queue: QueuePolicy::default(),
            bnb: BnBMode::default(),
            solve_mode: SolveMode::First,
            runs: DEFAULT_RUNS,
            node_limit: None,
        }
    }

    pub fn with_restore(mut self, restore: RestoreMode) -> Self {
        self.restore = restore;
        self
    }

    pub fn with_queue(mut self, queue: QueuePolicy) -> Self {
        self.queue = queue;
        self
    }

    pub fn with_bnb(mut self, bnb: BnBMode) -> Self {
        self.bnb = bnb;
        self
    }

    pub fn with_solve_mode(mut self, mode: SolveMode) -> Self {
        self.solve_mode = mode;
        self
    }

    pub fn with_runs(mut self, runs: usize) -> Self {
        self.runs = runs;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.runs == 0 {
            return Err(ConfigError::ZeroRuns);
        }
        if self.instance.extended && !self.instance.problem.supports_extended() {
            return Err(ConfigError::Instance(InstanceError::NoExtended(
                self.instance.problem.class_name(),
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("runs must be at least 1")]
    ZeroRuns,
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Restore(#[from] RestoreModeError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
}
