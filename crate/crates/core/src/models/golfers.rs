use crate::constraints::{BoolMode, Rel, SumMode};
use crate::domain::{Value, VarId};
use crate::model::{Model, ModelError};

use super::{invalid, pad};

/// Membership Booleans `member[week][player][group]`.
///
/// Each player is in one group per week, each group has `size` players, and
/// `meet[pair][week][group]` is true when both players of the pair are in
/// that group. Every pair meets at most once. Groups within a week and
/// consecutive weeks are lexicographically ordered.
pub(super) fn build(
    weeks: u32,
    groups: u32,
    size: u32,
    extended: bool,
    bool_mode: BoolMode,
    sum_mode: SumMode,
) -> Result<Model, ModelError> {
    let (w, g) = (weeks as usize, groups as usize);
    let players = g * size as usize;
    if players < 2 {
        return Err(invalid("golfers needs at least two players"));
    }
    let mut m = Model::new();
    let member: Vec<VarId> = (0..w * players * g).map(|_| m.new_boolean(bool_mode)).collect();
    let at = |wk: usize, p: usize, gr: usize| member[(wk * players + p) * g + gr];

    for wk in 0..w {
        for p in 0..players {
            let row: Vec<_> = (0..g).map(|gr| at(wk, p, gr)).collect();
            m.post_bool_sum(&row, Rel::Eq, 1, bool_mode, sum_mode)?;
        }
        for gr in 0..g {
            let col: Vec<_> = (0..players).map(|p| at(wk, p, gr)).collect();
            m.post_bool_sum(&col, Rel::Eq, size as i64, bool_mode, sum_mode)?;
        }
    }

    let mut aux = 0;
    for p in 0..players {
        for q in p + 1..players {
            let mut meets = Vec::with_capacity(w * g);
            for wk in 0..w {
                for gr in 0..g {
                    let z = m.new_boolean(bool_mode);
                    m.post_bool_and(z, at(wk, p, gr), at(wk, q, gr))?;
                    meets.push(z);
                }
            }
            aux += meets.len();
            m.post_bool_sum(&meets, Rel::Leq, 1, bool_mode, sum_mode)?;
            if sum_mode == SumMode::Decomposed {
                m.post_bool_sum(&meets, Rel::Geq, 0, bool_mode, sum_mode)?;
            }
        }
    }

    let group_vec = |wk: usize, gr: usize| -> Vec<VarId> { (0..players).map(|p| at(wk, p, gr)).collect() };
    let week_vec = |wk: usize| -> Vec<VarId> { (0..g).flat_map(|gr| group_vec(wk, gr)).collect() };
    for wk in 0..w {
        for a in 0..g {
            for b in a + 1..g {
                m.post_lex_leq(&group_vec(wk, a), &group_vec(wk, b), false)?;
            }
        }
    }
    for wk in 1..w {
        m.post_lex_leq(&week_vec(wk - 1), &week_vec(wk), false)?;
    }

    if extended {
        pad(&mut m, aux, |m| {
            m.new_boolean(bool_mode);
        });
    }
    m.set_branch_order(member);
    Ok(m)
}

pub(super) fn check(weeks: u32, groups: u32, size: u32, member: &[Value]) -> Option<String> {
    let (w, g) = (weeks as usize, groups as usize);
    let players = g * size as usize;
    if let Some(v) = member.iter().find(|&&v| v != 0 && v != 1) {
        return Some(format!("membership value {v} is not 0/1"));
    }
    // group_of[week][player]
    let mut group_of = vec![vec![0usize; players]; w];
    for wk in 0..w {
        let mut sizes = vec![0u32; g];
        for p in 0..players {
            let row = &member[(wk * players + p) * g..(wk * players + p + 1) * g];
            let chosen: Vec<usize> = (0..g).filter(|&gr| row[gr] == 1).collect();
            if chosen.len() != 1 {
                return Some(format!("player {p} is in {} groups in week {wk}", chosen.len()));
            }
            group_of[wk][p] = chosen[0];
            sizes[chosen[0]] += 1;
        }
        if let Some(gr) = sizes.iter().position(|&s| s != size) {
            return Some(format!("group {gr} in week {wk} has {} players", sizes[gr]));
        }
    }
    for p in 0..players {
        for q in p + 1..players {
            let met = (0..w).filter(|&wk| group_of[wk][p] == group_of[wk][q]).count();
            if met > 1 {
                return Some(format!("players {p} and {q} meet {met} times"));
            }
        }
    }
    None
}
