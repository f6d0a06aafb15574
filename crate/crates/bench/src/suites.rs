//! Preset experiment matrices.

use std::str::FromStr;

use fdlab::models::{Instance, Problem};
use fdlab::{BoolMode, RestoreMode};

use crate::config::{ConfigError, RunConfig};
use crate::report::{ratio_report, RatioReport};
use crate::runner::RunRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// Native Booleans against `{0..1}` integers on Boolean models.
    BoolInt,
    /// Copying with recomputation over a range of distances.
    Copy,
    /// Trailing against copying.
    Trail,
    /// Normal against extended (padded) models.
    ManyVars,
}

impl FromStr for Suite {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "boolint" => Ok(Suite::BoolInt),
            "copy" => Ok(Suite::Copy),
            "trail" => Ok(Suite::Trail),
            "manyvars" => Ok(Suite::ManyVars),
            other => Err(ConfigError::UnknownSuite(other.to_string())),
        }
    }
}

/// Recomputation distances swept by [`Suite::Copy`]; 1 is full copying.
pub const DISTANCES: [u32; 6] = [1, 2, 4, 8, 16, 32];
/// Adaptive distance used with every swept distance.
pub const SWEEP_ADAPTIVE_DISTANCE: u32 = 2;

fn parse(list: &[&str]) -> Vec<Problem> {
    list.iter().map(|s| s.parse().expect("preset instances are valid")).collect()
}

fn queens(full: bool) -> Vec<Problem> {
    if full {
        (20..=29).map(|n| Problem::Queens { n }).collect()
    } else {
        parse(&["queens:8", "queens:10", "queens:12", "queens:14", "queens:16"])
    }
}

fn golfers(full: bool) -> Vec<Problem> {
    if full {
        (4..=10).map(|groups| Problem::Golfers { weeks: 2, groups, size: 4 }).collect()
    } else {
        parse(&["golfers:2,3,3", "golfers:2,4,4", "golfers:2,5,4"])
    }
}

fn bibd(full: bool) -> Vec<Problem> {
    if full {
        (1..=7).map(|i| Problem::Bibd { v: 7, k: 3, lambda: 10 * i }).collect()
    } else {
        parse(&["bibd:7,3,2", "bibd:7,3,4", "bibd:7,3,6", "bibd:7,3,10"])
    }
}

/// Configurations for `suite`. `full` selects the large published instance
/// lists instead of the quick desk-scale ones.
pub fn configs(suite: Suite, full: bool, runs: usize) -> Vec<RunConfig> {
    let base = |p: Problem| RunConfig::new(Instance::new(p)).with_runs(runs);
    let mut out = Vec::new();
    match suite {
        Suite::BoolInt => {
            for p in golfers(full).into_iter().chain(bibd(full)) {
                for mode in [BoolMode::NativeBool, BoolMode::IntZeroOne] {
                    let mut c = base(p);
                    c.instance = c.instance.with_bool_mode(mode);
                    out.push(c);
                }
            }
        }
        Suite::Copy => {
            for p in queens(full).into_iter().chain(golfers(full)).chain(bibd(full)) {
                for d in DISTANCES {
                    let mode = RestoreMode::copy_recompute(d, SWEEP_ADAPTIVE_DISTANCE)
                        .expect("preset distances are positive");
                    out.push(base(p).with_restore(mode));
                }
            }
        }
        Suite::Trail => {
            for p in queens(full).into_iter().chain(golfers(full)).chain(bibd(full)) {
                for mode in [RestoreMode::Trail, RestoreMode::Copy] {
                    out.push(base(p).with_restore(mode));
                }
            }
        }
        Suite::ManyVars => {
            for p in queens(full).into_iter().chain(golfers(full)) {
                for extended in [false, true] {
                    for mode in [RestoreMode::Trail, RestoreMode::Copy] {
                        let mut c = base(p).with_restore(mode);
                        c.instance = c.instance.extended(extended);
                        out.push(c);
                    }
                }
            }
        }
    }
    out
}

/// The ratio tables a suite is meant to produce, with a title each.
pub fn ratios(suite: Suite, records: &[RunRecord]) -> Vec<(String, RatioReport)> {
    let restore = |r: &RunRecord| r.config.restore;
    match suite {
        Suite::BoolInt => vec![(
            "integer over Boolean".into(),
            ratio_report(
                records,
                |r| r.config.instance.bool_mode == BoolMode::IntZeroOne,
                |r| r.config.instance.bool_mode == BoolMode::NativeBool,
            ),
        )],
        Suite::Copy => DISTANCES[1..]
            .iter()
            .map(|&d| {
                let is = move |dist: u32| {
                    move |r: &RunRecord| {
                        matches!(restore(r), RestoreMode::CopyRecompute { distance, .. } if distance == dist)
                    }
                };
                (format!("distance {d} over distance 1"), ratio_report(records, is(d), is(1)))
            })
            .collect(),
        Suite::Trail => vec![(
            "trail over copy".into(),
            ratio_report(
                records,
                |r| restore(r) == RestoreMode::Trail,
                |r| restore(r) == RestoreMode::Copy,
            ),
        )],
        Suite::ManyVars => [RestoreMode::Trail, RestoreMode::Copy]
            .into_iter()
            .map(|mode| {
                (
                    format!("extended over normal, {}", mode.as_str()),
                    ratio_report(
                        records,
                        |r| restore(r) == mode && r.config.instance.extended,
                        |r| restore(r) == mode && !r.config.instance.extended,
                    ),
                )
            })
            .collect(),
    }
}
