use std::collections::HashSet;

use crate::constraints::{LinearTerm, Rel, SumMode};
use crate::domain::Value;
use crate::model::{Model, ModelError};

use super::invalid;

/// `m` ticks in `0..=m^2`, the first pinned at 0, strictly increasing, with
/// one difference variable per pair and an alldifferent over the differences.
/// The objective is the last tick.
pub(super) fn build(m: u32, sum_mode: SumMode) -> Result<Model, ModelError> {
    if m < 2 {
        return Err(invalid("golomb needs m >= 2"));
    }
    let hi = (m * m) as Value;
    let mut model = Model::new();
    let ticks = (0..m).map(|_| model.new_int_var(0, hi)).collect::<Result<Vec<_>, _>>()?;
    let mut diffs = Vec::new();
    for i in 0..ticks.len() {
        for j in i + 1..ticks.len() {
            let d = model.new_int_var(0, hi)?;
            let terms =
                [LinearTerm::new(1, ticks[j]), LinearTerm::new(-1, ticks[i]), LinearTerm::new(-1, d)];
            model.post_linear(&terms, Rel::Eq, 0, sum_mode)?;
            diffs.push(d);
        }
    }
    model.post_eq_const(ticks[0], 0)?;
    for w in ticks.windows(2) {
        model.post_le(w[0], w[1], true)?;
    }
    model.post_alldifferent(&diffs)?;
    model.set_objective(*ticks.last().expect("m >= 2"));
    model.set_branch_order(ticks);
    Ok(model)
}

pub(super) fn check(m: u32, ticks: &[Value]) -> Option<String> {
    if ticks.first() != Some(&0) {
        return Some("the first tick is not at 0".into());
    }
    if let Some(w) = ticks.windows(2).find(|w| w[0] >= w[1]) {
        return Some(format!("ticks {} and {} are not increasing", w[0], w[1]));
    }
    let mut seen = HashSet::new();
    for i in 0..m as usize {
        for j in i + 1..m as usize {
            let d = ticks[j] - ticks[i];
            if !seen.insert(d) {
                return Some(format!("distance {d} occurs twice"));
            }
        }
    }
    None
}
