use crate::constraints::{BoolMode, Rel, SumMode};
use crate::domain::{Value, VarId};
use crate::model::{Model, ModelError};

use super::invalid;

/// Number of blocks `b` and replication `r` of a `(v, k, lambda)` design.
pub fn bibd_params(v: u32, k: u32, lambda: u32) -> Result<(u32, u32), ModelError> {
    if v < 2 || k < 2 || k > v || lambda == 0 {
        return Err(invalid(format!("bibd needs 2 <= k <= v and lambda >= 1, got {v},{k},{lambda}")));
    }
    let (v64, k64, l64) = (v as u64, k as u64, lambda as u64);
    let b_num = l64 * v64 * (v64 - 1);
    let b_den = k64 * (k64 - 1);
    let r_num = l64 * (v64 - 1);
    let r_den = k64 - 1;
    if b_num % b_den != 0 {
        return Err(invalid(format!("bibd {v},{k},{lambda}: k(k-1) does not divide lambda*v(v-1)")));
    }
    if r_num % r_den != 0 {
        return Err(invalid(format!("bibd {v},{k},{lambda}: k-1 does not divide lambda*(v-1)")));
    }
    let b = u32::try_from(b_num / b_den).map_err(|_| invalid("bibd block count overflows"))?;
    let r = u32::try_from(r_num / r_den).map_err(|_| invalid("bibd replication overflows"))?;
    Ok((b, r))
}

/// A `v x b` incidence matrix with row sums `r`, column sums `k` and every
/// pair of rows sharing exactly `lambda` columns, via one conjunction
/// variable per row pair and column. Adjacent rows and adjacent columns are
/// lexicographically ordered.
pub(super) fn build(
    v: u32,
    k: u32,
    lambda: u32,
    bool_mode: BoolMode,
    sum_mode: SumMode,
) -> Result<Model, ModelError> {
    let (b, r) = bibd_params(v, k, lambda)?;
    let (rows, cols) = (v as usize, b as usize);
    let mut m = Model::new();
    let x: Vec<VarId> = (0..rows * cols).map(|_| m.new_boolean(bool_mode)).collect();
    let row = |i: usize| -> Vec<VarId> { x[i * cols..(i + 1) * cols].to_vec() };
    let col = |j: usize| -> Vec<VarId> { (0..rows).map(|i| x[i * cols + j]).collect() };

    for i in 0..rows {
        m.post_bool_sum(&row(i), Rel::Eq, r as i64, bool_mode, sum_mode)?;
    }
    for j in 0..cols {
        m.post_bool_sum(&col(j), Rel::Eq, k as i64, bool_mode, sum_mode)?;
    }
    for i in 0..rows {
        for i2 in i + 1..rows {
            let mut shared = Vec::with_capacity(cols);
            for j in 0..cols {
                let z = m.new_boolean(bool_mode);
                m.post_bool_and(z, x[i * cols + j], x[i2 * cols + j])?;
                shared.push(z);
            }
            m.post_bool_sum(&shared, Rel::Eq, lambda as i64, bool_mode, sum_mode)?;
        }
    }
    for i in 1..rows {
        m.post_lex_leq(&row(i - 1), &row(i), false)?;
    }
    for j in 1..cols {
        m.post_lex_leq(&col(j - 1), &col(j), false)?;
    }
    m.set_branch_order(x);
    Ok(m)
}

pub(super) fn check(v: u32, k: u32, lambda: u32, x: &[Value]) -> Option<String> {
    let (b, r) = match bibd_params(v, k, lambda) {
        Ok(p) => p,
        Err(e) => return Some(e.to_string()),
    };
    let (rows, cols) = (v as usize, b as usize);
    if let Some(val) = x.iter().find(|&&val| val != 0 && val != 1) {
        return Some(format!("incidence value {val} is not 0/1"));
    }
    let at = |i: usize, j: usize| x[i * cols + j];
    for i in 0..rows {
        let s: Value = (0..cols).map(|j| at(i, j)).sum();
        if s != r as Value {
            return Some(format!("row {i} sums to {s}, not {r}"));
        }
    }
    for j in 0..cols {
        let s: Value = (0..rows).map(|i| at(i, j)).sum();
        if s != k as Value {
            return Some(format!("column {j} sums to {s}, not {k}"));
        }
    }
    for i in 0..rows {
        for i2 in i + 1..rows {
            let dot: Value = (0..cols).map(|j| at(i, j) * at(i2, j)).sum();
            if dot != lambda as Value {
                return Some(format!("rows {i} and {i2} share {dot} blocks, not {lambda}"));
            }
        }
    }
    None
}
