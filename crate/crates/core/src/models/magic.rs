use crate::constraints::{LinearTerm, Rel, SumMode};
use crate::domain::{Value, VarId};
use crate::model::{Model, ModelError};

use super::invalid;

fn magic_sum(n: i64) -> i64 {
    n * (n * n + 1) / 2
}

/// Lines that must reach the magic sum: rows, columns and both diagonals, as
/// cell indices.
fn lines(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(2 * n + 2);
    for r in 0..n {
        out.push((0..n).map(|c| r * n + c).collect());
    }
    for c in 0..n {
        out.push((0..n).map(|r| r * n + c).collect());
    }
    out.push((0..n).map(|i| i * n + i).collect());
    out.push((0..n).map(|i| i * n + (n - 1 - i)).collect());
    out
}

/// `n^2` cells holding `1..=n^2` once each, every line summing to the magic
/// sum, and four corner orderings that leave one square per symmetry class.
pub(super) fn build(n: u32, sum_mode: SumMode) -> Result<Model, ModelError> {
    if n < 2 {
        return Err(invalid("magic needs n >= 2"));
    }
    let size = n as usize;
    let mut m = Model::new();
    let cells: Vec<VarId> = (0..size * size)
        .map(|_| m.new_int_var(1, (size * size) as Value))
        .collect::<Result<_, _>>()?;
    m.post_alldifferent(&cells)?;
    for line in lines(size) {
        let terms: Vec<_> = line.iter().map(|&i| LinearTerm::new(1, cells[i])).collect();
        m.post_linear(&terms, Rel::Eq, magic_sum(n as i64), sum_mode)?;
    }
    let (tl, tr) = (cells[0], cells[size - 1]);
    let (bl, br) = (cells[size * (size - 1)], cells[size * size - 1]);
    m.post_le(tl, tr, false)?;
    m.post_le(tl, bl, false)?;
    m.post_le(tl, br, false)?;
    m.post_le(tr, bl, false)?;
    m.set_branch_order(cells);
    Ok(m)
}

pub(super) fn check(n: u32, cells: &[Value]) -> Option<String> {
    let size = n as usize;
    let mut seen = vec![false; size * size + 1];
    for &v in cells {
        if v < 1 || v as usize > size * size {
            return Some(format!("value {v} is outside 1..={}", size * size));
        }
        if std::mem::replace(&mut seen[v as usize], true) {
            return Some(format!("value {v} appears twice"));
        }
    }
    let target = magic_sum(n as i64);
    for line in lines(size) {
        let sum: i64 = line.iter().map(|&i| cells[i] as i64).sum();
        if sum != target {
            return Some(format!("a line sums to {sum}, not {target}"));
        }
    }
    None
}
