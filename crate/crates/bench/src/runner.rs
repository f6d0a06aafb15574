use fdlab::models::build;
use fdlab::{minimize, solve, SearchConfig, SearchError, SearchStats, Value};
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{ConfigError, RunConfig};
use crate::stats::{cov, median};

/// What the search concluded, identical across repetitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// At least one solution; `objective` holds the optimum for
    /// optimisation classes.
    Solved { objective: Option<Value> },
    Infeasible,
    /// The node limit stopped the search before it could conclude.
    Incomplete,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub config: RunConfig,
    pub outcome: Outcome,
    /// One entry per repetition.
    pub runs: Vec<SearchStats>,
    pub setup_ms_median: f64,
    pub solve_ms_median: f64,
    /// Coefficient of variation of `solve_ms` across repetitions.
    pub cov: f64,
}

impl RunRecord {
    /// Stats of the first repetition. Trajectory and restore counters are
    /// the same in every repetition.
    pub fn stats(&self) -> &SearchStats {
        &self.runs[0]
    }

    /// Nodes per second of median solve time.
    pub fn nps(&self) -> f64 {
        self.stats().nodes as f64 / (self.solve_ms_median / 1e3).max(1e-9)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RunError {
    #[error("{config}: {source}")]
    Config { config: String, source: ConfigError },
    #[error("{config}: repetition {run} explored {got:?} instead of {expected:?}")]
    Nondeterministic { config: String, run: usize, expected: (u64, u64, u64), got: (u64, u64, u64) },
}

fn label(cfg: &RunConfig) -> String {
    format!("{} ({})", cfg.instance, cfg.restore.as_str())
}

fn search_once(cfg: &RunConfig) -> Result<(SearchStats, Outcome), ConfigError> {
    let model = build(&cfg.instance)?;
    let mut search = SearchConfig::new(cfg.restore, cfg.queue).with_bnb(cfg.bnb);
    search.node_limit = cfg.node_limit;
    if cfg.instance.problem.is_optimisation() {
        Ok(match minimize(model, &search) {
            Ok(o) if o.complete => (o.stats, Outcome::Solved { objective: Some(o.value) }),
            Ok(o) => (o.stats, Outcome::Incomplete),
            Err(SearchError::Infeasible(s)) => (s, Outcome::Infeasible),
            Err(SearchError::LimitReached(s)) => (s, Outcome::Incomplete),
            Err(SearchError::NoObjective) => unreachable!("optimisation models set an objective"),
        })
    } else {
        let out = solve(model, cfg.solve_mode, &search);
        let outcome = if !out.solutions.is_empty() {
            Outcome::Solved { objective: None }
        } else if out.complete {
            Outcome::Infeasible
        } else {
            Outcome::Incomplete
        };
        Ok((out.stats, outcome))
    }
}

/// Runs one configuration `runs` times and aggregates the timings.
pub fn run_config(cfg: &RunConfig) -> Result<RunRecord, RunError> {
    let wrap = |source| RunError::Config { config: label(cfg), source };
    cfg.validate().map_err(wrap)?;
    let mut runs = Vec::with_capacity(cfg.runs);
    let mut outcome = None;
    for run in 0..cfg.runs {
        let (stats, o) = search_once(cfg).map_err(wrap)?;
        if let Some(first) = runs.first().map(SearchStats::trajectory) {
            if first != stats.trajectory() {
                return Err(RunError::Nondeterministic {
                    config: label(cfg),
                    run,
                    expected: first,
                    got: stats.trajectory(),
                });
            }
        }
        outcome.get_or_insert(o);
        runs.push(stats);
    }
    let solve: Vec<f64> = runs.iter().map(SearchStats::solve_ms).collect();
    let setup: Vec<f64> = runs.iter().map(SearchStats::setup_ms).collect();
    Ok(RunRecord {
        config: *cfg,
        outcome: outcome.expect("runs >= 1"),
        setup_ms_median: median(&setup).expect("runs >= 1"),
        solve_ms_median: median(&solve).expect("runs >= 1"),
        cov: cov(&solve),
        runs,
    })
}

/// Runs every configuration, in parallel unless `sequential`. Results keep
/// the order of `configs`; a failing configuration does not stop the rest.
pub fn run_matrix(configs: &[RunConfig], sequential: bool) -> Vec<Result<RunRecord, RunError>> {
    if sequential {
        configs.iter().map(run_config).collect()
    } else {
        configs.par_iter().map(run_config).collect()
    }
}
