use crate::constraints::{LinearTerm, Rel, SumMode};
use crate::domain::Value;
use crate::model::{Model, ModelError};

use super::{invalid, pad};

/// One variable per row holding the queen's column, one difference variable
/// per pair of rows that must avoid the two diagonal offsets, and an
/// alldifferent over the columns.
pub(super) fn build(n: u32, extended: bool, sum_mode: SumMode) -> Result<Model, ModelError> {
    if n < 2 {
        return Err(invalid("queens needs n >= 2"));
    }
    let n = n as Value;
    let mut m = Model::new();
    let queens = (0..n).map(|_| m.new_int_var(0, n - 1)).collect::<Result<Vec<_>, _>>()?;
    let mut aux = 0;
    for i in 0..n {
        for j in i + 1..n {
            let d = m.new_int_var(-(n - 1), n - 1)?;
            aux += 1;
            let terms = [
                LinearTerm::new(1, queens[i as usize]),
                LinearTerm::new(-1, queens[j as usize]),
                LinearTerm::new(-1, d),
            ];
            m.post_linear(&terms, Rel::Eq, 0, sum_mode)?;
            m.post_ne_const(d, j - i)?;
            m.post_ne_const(d, i - j)?;
        }
    }
    m.post_alldifferent(&queens)?;
    if extended {
        pad(&mut m, aux, |m| {
            m.new_int_var(0, 1).expect("0..1 is a valid domain");
        });
    }
    m.set_branch_order(queens);
    Ok(m)
}

pub(super) fn check(n: u32, cols: &[Value]) -> Option<String> {
    for (i, &c) in cols.iter().enumerate() {
        if !(0..n as Value).contains(&c) {
            return Some(format!("row {i}: column {c} is off the board"));
        }
    }
    for i in 0..cols.len() {
        for j in i + 1..cols.len() {
            if cols[i] == cols[j] {
                return Some(format!("rows {i} and {j} share column {}", cols[i]));
            }
            if (cols[i] - cols[j]).unsigned_abs() as usize == j - i {
                return Some(format!("rows {i} and {j} share a diagonal"));
            }
        }
    }
    None
}
