//! Published reference numbers shipped with the harness.

use fdlab::models::{counts, Instance, ModelCounts, Problem};
use fdlab::ModelError;
use serde::Deserialize;
use thiserror::Error;

const PUBLISHED_COUNTS: &str = include_str!("../data/published_counts.csv");
const PUBLISHED_EXTENDED_COUNTS: &str = include_str!("../data/published_extended_counts.csv");
const REFERENCE_BACKTRACKS: &str = include_str!("../data/reference_backtracks.csv");

#[derive(Debug, Error)]
pub enum DataError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("bad instance in data file: {0}")]
    Instance(#[from] fdlab::models::InstanceError),
}

#[derive(Debug, Deserialize)]
struct CountsRow {
    model: String,
    instance: String,
    variables: usize,
    constraints_native: usize,
    constraints_decomposed: usize,
}

#[derive(Debug, Deserialize)]
struct ExtendedRow {
    model: String,
    instance: String,
    variables: usize,
    extended_variables: usize,
}

#[derive(Debug, Deserialize)]
struct BacktracksRow {
    model: String,
    instance: String,
    backtracks: u64,
}

fn problem(model: &str, instance: &str) -> Result<Problem, DataError> {
    Ok(format!("{model}:{instance}").parse()?)
}

fn rows<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>, DataError> {
    Ok(csv::Reader::from_reader(text.as_bytes()).deserialize().collect::<Result<_, _>>()?)
}

/// Published variable and constraint counts per instance.
pub fn published_counts() -> Result<Vec<(Problem, ModelCounts)>, DataError> {
    rows::<CountsRow>(PUBLISHED_COUNTS)?
        .into_iter()
        .map(|r| {
            let c = ModelCounts {
                variables: r.variables,
                constraints_native: r.constraints_native,
                constraints_decomposed: r.constraints_decomposed,
            };
            Ok((problem(&r.model, &r.instance)?, c))
        })
        .collect()
}

/// Published variable counts of the normal and extended models.
pub fn published_extended_counts() -> Result<Vec<(Problem, usize, usize)>, DataError> {
    rows::<ExtendedRow>(PUBLISHED_EXTENDED_COUNTS)?
        .into_iter()
        .map(|r| Ok((problem(&r.model, &r.instance)?, r.variables, r.extended_variables)))
        .collect()
}

/// Backtrack counts reported for another solver with different propagation
/// strength and branching. Reference only: nothing is asserted against them.
pub fn reference_backtracks() -> Result<Vec<(Problem, u64)>, DataError> {
    rows::<BacktracksRow>(REFERENCE_BACKTRACKS)?
        .into_iter()
        .map(|r| Ok((problem(&r.model, &r.instance)?, r.backtracks)))
        .collect()
}

/// Built counts next to published counts for one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountCheck {
    pub instance: Instance,
    pub expected: ModelCounts,
    pub actual: ModelCounts,
}

impl CountCheck {
    pub fn matches(&self) -> bool {
        self.expected == self.actual
    }
}

/// Builds every published instance, normal and extended, and pairs the
/// counts. Extended entries only compare variables; their constraint counts
/// equal the normal model's.
pub fn check_counts() -> Result<Vec<CountCheck>, CheckCountsError> {
    let mut out = Vec::new();
    for (p, expected) in published_counts()? {
        let instance = Instance::new(p);
        out.push(CountCheck { instance, expected, actual: counts(&instance)? });
    }
    for (p, normal, extended) in published_extended_counts()? {
        let instance = Instance::new(p).extended(true);
        let actual = counts(&instance)?;
        let base = out
            .iter()
            .find(|c| c.instance.problem == p && !c.instance.extended)
            .map(|c| c.expected)
            .unwrap_or(actual);
        debug_assert_eq!(base.variables, normal);
        let expected = ModelCounts { variables: extended, ..base };
        out.push(CountCheck { instance, expected, actual });
    }
    Ok(out)
}

#[derive(Debug, Error)]
pub enum CheckCountsError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Model(#[from] ModelError),
}
