//! Builders for the benchmark problem classes, instance parsing, variable and
//! constraint accounting, and solution checkers that work from the problem
//! definitions rather than from the posted constraints.
//!
//! A solution is the flat list of decision-variable values in branch order:
//!
//! * queens: the column of the queen in each row;
//! * golomb: the tick positions;
//! * magic: the cells, row by row;
//! * golfers: `member[week][player][group]` as 0/1;
//! * bibd: the `v x b` incidence matrix, row by row.

mod bibd;
mod golfers;
mod golomb;
mod magic;
mod queens;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use thiserror::Error;

use crate::constraints::{BoolMode, SumMode};
use crate::domain::Value;
use crate::model::{Model, ModelError};

pub use bibd::bibd_params;

/// Unconstrained padding variables added per auxiliary variable by the
/// extended models.
pub const EXTENDED_PADDING: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Problem {
    Queens { n: u32 },
    Golomb { m: u32 },
    Magic { n: u32 },
    /// `weeks` weeks of `groups` groups with `size` players each.
    Golfers { weeks: u32, groups: u32, size: u32 },
    Bibd { v: u32, k: u32, lambda: u32 },
}

impl Problem {
    pub fn class_name(&self) -> &'static str {
        match self {
            Problem::Queens { .. } => "queens",
            Problem::Golomb { .. } => "golomb",
            Problem::Magic { .. } => "magic",
            Problem::Golfers { .. } => "golfers",
            Problem::Bibd { .. } => "bibd",
        }
    }

    /// The parameter list as written after the colon.
    pub fn params(&self) -> String {
        match *self {
            Problem::Queens { n } | Problem::Magic { n } => n.to_string(),
            Problem::Golomb { m } => m.to_string(),
            Problem::Golfers { weeks, groups, size } => format!("{weeks},{groups},{size}"),
            Problem::Bibd { v, k, lambda } => format!("{v},{k},{lambda}"),
        }
    }

    pub fn supports_extended(&self) -> bool {
        matches!(self, Problem::Queens { .. } | Problem::Golfers { .. })
    }

    /// Whether the class is built from 0/1 variables, so that [`BoolMode`]
    /// matters.
    pub fn is_boolean(&self) -> bool {
        matches!(self, Problem::Golfers { .. } | Problem::Bibd { .. })
    }

    pub fn is_optimisation(&self) -> bool {
        matches!(self, Problem::Golomb { .. })
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.class_name(), self.params())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Instance {
    pub problem: Problem,
    pub extended: bool,
    pub bool_mode: BoolMode,
    pub sum_mode: SumMode,
}

impl Instance {
    pub fn new(problem: Problem) -> Self {
        Self {
            problem,
            extended: false,
            bool_mode: BoolMode::default(),
            sum_mode: SumMode::default(),
        }
    }

    pub fn extended(mut self, on: bool) -> Self {
        self.extended = on;
        self
    }

    pub fn with_bool_mode(mut self, mode: BoolMode) -> Self {
        self.bool_mode = mode;
        self
    }

    pub fn with_sum_mode(mut self, mode: SumMode) -> Self {
        self.sum_mode = mode;
        self
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.problem)?;
        if self.extended {
            write!(f, "+ext")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("expected `class:params`, got `{0}`")]
    Syntax(String),
    #[error("unknown problem class `{0}`")]
    UnknownClass(String),
    #[error("unknown flag `+{0}`")]
    UnknownFlag(String),
    #[error("`{class}` takes {expected} parameter(s), got `{got}`")]
    Arity { class: &'static str, expected: usize, got: String },
    #[error("`{0}` is not a positive integer")]
    BadNumber(String),
    #[error("{0} has no extended variant")]
    NoExtended(&'static str),
}

fn parse_params(
    class: &'static str,
    text: &str,
    expected: usize,
) -> Result<Vec<u32>, InstanceError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != expected {
        return Err(InstanceError::Arity { class, expected, got: text.to_string() });
    }
    parts
        .iter()
        .map(|p| match p.parse::<u32>() {
            Ok(v) if v > 0 => Ok(v),
            _ => Err(InstanceError::BadNumber(p.to_string())),
        })
        .collect()
}

impl FromStr for Problem {
    type Err = InstanceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (class, params) =
            s.split_once(':').ok_or_else(|| InstanceError::Syntax(s.to_string()))?;
        let problem = match class.trim().to_ascii_lowercase().as_str() {
            "queens" => Problem::Queens { n: parse_params("queens", params, 1)?[0] },
            "golomb" => Problem::Golomb { m: parse_params("golomb", params, 1)?[0] },
            "magic" => Problem::Magic { n: parse_params("magic", params, 1)?[0] },
            "golfers" => {
                let p = parse_params("golfers", params, 3)?;
                Problem::Golfers { weeks: p[0], groups: p[1], size: p[2] }
            }
            "bibd" => {
                let p = parse_params("bibd", params, 3)?;
                Problem::Bibd { v: p[0], k: p[1], lambda: p[2] }
            }
            other => return Err(InstanceError::UnknownClass(other.to_string())),
        };
        Ok(problem)
    }
}

/// Parses `class:params` with optional `+ext`.
impl FromStr for Instance {
    type Err = InstanceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut pieces = s.trim().split('+');
        let head = pieces.next().unwrap_or_default();
        let mut inst = Instance::new(head.parse()?);
        for flag in pieces {
            match flag.trim() {
                "ext" => inst.extended = true,
                other => return Err(InstanceError::UnknownFlag(other.to_string())),
            }
        }
        if inst.extended && !inst.problem.supports_extended() {
            return Err(InstanceError::NoExtended(inst.problem.class_name()));
        }
        Ok(inst)
    }
}

fn invalid(msg: impl Into<String>) -> ModelError {
    ModelError::Instance(msg.into())
}

/// Builds the model for `inst` and records how long that took.
pub fn build(inst: &Instance) -> Result<Model, ModelError> {
    let start = Instant::now();
    if inst.extended && !inst.problem.supports_extended() {
        return Err(invalid(format!("{} has no extended variant", inst.problem.class_name())));
    }
    let mut model = match inst.problem {
        Problem::Queens { n } => queens::build(n, inst.extended, inst.sum_mode)?,
        Problem::Golomb { m } => golomb::build(m, inst.sum_mode)?,
        Problem::Magic { n } => magic::build(n, inst.sum_mode)?,
        Problem::Golfers { weeks, groups, size } => {
            golfers::build(weeks, groups, size, inst.extended, inst.bool_mode, inst.sum_mode)?
        }
        Problem::Bibd { v, k, lambda } => bibd::build(v, k, lambda, inst.bool_mode, inst.sum_mode)?,
    };
    model.set_build_time(start.elapsed());
    Ok(model)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModelCounts {
    pub variables: usize,
    pub constraints_native: usize,
    pub constraints_decomposed: usize,
}

/// Counts variables and posted constraints by building the model once per
/// sum mode and enumerating what was posted.
pub fn counts(inst: &Instance) -> Result<ModelCounts, ModelError> {
    let native = build(&inst.with_sum_mode(SumMode::NativeEquals))?;
    let decomposed = build(&inst.with_sum_mode(SumMode::Decomposed))?;
    debug_assert_eq!(native.num_vars(), decomposed.num_vars());
    Ok(ModelCounts {
        variables: native.num_vars(),
        constraints_native: native.constraints().len(),
        constraints_decomposed: decomposed.constraints().len(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Violation(String),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        *self == Verdict::Valid
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("assignment has {got} values, expected {expected}")]
    Incomplete { expected: usize, got: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Number of decision variables of `problem`, i.e. the length of a solution.
pub fn decision_count(problem: &Problem) -> Result<usize, ModelError> {
    Ok(match *problem {
        Problem::Queens { n } => n as usize,
        Problem::Magic { n } => (n * n) as usize,
        Problem::Golomb { m } => m as usize,
        Problem::Golfers { weeks, groups, size } => (weeks * groups * groups * size) as usize,
        Problem::Bibd { v, k, lambda } => {
            let (b, _) = bibd_params(v, k, lambda)?;
            v as usize * b as usize
        }
    })
}

/// Checks `values` against the defining properties of the problem.
/// Symmetry-breaking orderings are not checked.
pub fn check_solution(problem: &Problem, values: &[Value]) -> Result<Verdict, CheckError> {
    let expected = decision_count(problem)?;
    if values.len() != expected {
        return Err(CheckError::Incomplete { expected, got: values.len() });
    }
    let violation = match *problem {
        Problem::Queens { n } => queens::check(n, values),
        Problem::Golomb { m } => golomb::check(m, values),
        Problem::Magic { n } => magic::check(n, values),
        Problem::Golfers { weeks, groups, size } => golfers::check(weeks, groups, size, values),
        Problem::Bibd { v, k, lambda } => bibd::check(v, k, lambda, values),
    };
    Ok(violation.map_or(Verdict::Valid, Verdict::Violation))
}

/// Adds `count * EXTENDED_PADDING` padding variables created by `make`.
fn pad(model: &mut Model, count: usize, mut make: impl FnMut(&mut Model)) {
    for _ in 0..count * EXTENDED_PADDING {
        make(model);
    }
}
