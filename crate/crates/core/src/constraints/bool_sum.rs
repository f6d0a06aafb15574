//! Counting propagator for sums over native Boolean variables.

use crate::domain::{BoolState, EventClass, VarId};
use crate::propagate::{PropCtx, PropResult, Propagator, Status};

use super::Rel;

/// `count(x_i = true) rel c` over Boolean-kind variables.
///
/// Pruning is the same as bounds propagation of the equivalent linear sum:
/// once the true count reaches the upper limit the rest are set false, and
/// once the not-false count reaches the lower limit the rest are set true.
#[derive(Debug, Clone)]
pub struct BoolSum {
    vars: Vec<VarId>,
    rel: Rel,
    c: i64,
}

impl BoolSum {
    pub fn new(vars: Vec<VarId>, rel: Rel, c: i64) -> Self {
        debug_assert!(vars.iter().all(|x| x.is_bool()));
        Self { vars, rel, c }
    }

    fn counts(&self, ctx: &PropCtx<'_>) -> (i64, i64) {
        let store = ctx.store();
        let (mut t, mut f) = (0, 0);
        for &x in &self.vars {
            match store.bool_state(x) {
                BoolState::True => t += 1,
                BoolState::False => f += 1,
                BoolState::Unknown => {}
            }
        }
        (t, f)
    }

    fn fill(&self, ctx: &mut PropCtx<'_>, value: i32) -> PropResult {
        for &x in &self.vars {
            if !ctx.is_fixed(x) {
                ctx.assign(x, value)?;
            }
        }
        Ok(Status::Subsumed)
    }
}

impl Propagator for BoolSum {
    fn name(&self) -> &'static str {
        "bool_sum"
    }

    fn subscriptions(&self) -> Vec<(VarId, EventClass)> {
        self.vars.iter().map(|&x| (x, EventClass::Instantiated)).collect()
    }

    fn propagate(&self, ctx: &mut PropCtx<'_>) -> PropResult {
        let n = self.vars.len() as i64;
        let (t, f) = self.counts(ctx);
        let upper = n - f;
        let (check_le, check_ge) = match self.rel {
            Rel::Leq => (true, false),
            Rel::Geq => (false, true),
            Rel::Eq => (true, true),
        };
        if (check_le && t > self.c) || (check_ge && upper < self.c) {
            return Err(crate::propagate::Conflict);
        }
        if check_le && t == self.c {
            return self.fill(ctx, 0);
        }
        if check_ge && upper == self.c {
            return self.fill(ctx, 1);
        }
        let le_done = !check_le || upper <= self.c;
        let ge_done = !check_ge || t >= self.c;
        Ok(if le_done && ge_done { Status::Subsumed } else { Status::AtFixpoint })
    }
}
