//! Experiment harness for `fdlab`: repeated runs over configuration
//! matrices, median and coefficient-of-variation aggregation, ratio tables
//! and CSV/JSON output.

pub mod config;
pub mod data;
pub mod emit;
pub mod report;
pub mod runner;
pub mod stats;
pub mod suites;

pub use config::{ConfigError, RunConfig, DEFAULT_RUNS};
pub use emit::{emit, Format, Row};
pub use report::{ratio_report, RatioReport, RatioRow};
pub use runner::{run_config, run_matrix, Outcome, RunError, RunRecord};
