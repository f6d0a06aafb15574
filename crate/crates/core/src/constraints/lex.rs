//! Lexicographic ordering of two vectors.
//!
//! Generalised arc consistency for `xs <=lex ys` only ever needs to prune the
//! first position `alpha` where the vectors are not already fixed and equal.
//! Whether that position must be strict depends on whether the suffix after it
//! is already forced to compare greater (or greater-or-equal for `<lex`).

use crate::domain::{EventClass, VarId};
use crate::propagate::{Conflict, PropCtx, PropResult, Propagator, Status};

#[derive(Debug, Clone)]
pub struct LexLeq {
    xs: Vec<VarId>,
    ys: Vec<VarId>,
    strict: bool,
}

impl LexLeq {
    pub fn new(xs: Vec<VarId>, ys: Vec<VarId>, strict: bool) -> Self {
        assert_eq!(xs.len(), ys.len());
        Self { xs, ys, strict }
    }

    /// True when `xs[from..]` is forced to compare `>` `ys[from..]` (`>=` when
    /// strict), i.e. the suffix cannot help satisfy the ordering.
    fn suffix_blocks(&self, ctx: &PropCtx<'_>, from: usize) -> bool {
        let mut blocked = self.strict;
        for k in (from..self.xs.len()).rev() {
            let (lo_x, hi_y) = (ctx.min(self.xs[k]), ctx.max(self.ys[k]));
            blocked = lo_x > hi_y || (lo_x >= hi_y && blocked);
        }
        blocked
    }
}

impl Propagator for LexLeq {
    fn name(&self) -> &'static str {
        if self.strict {
            "lex_less"
        } else {
            "lex_leq"
        }
    }

    fn subscriptions(&self) -> Vec<(VarId, EventClass)> {
        self.xs
            .iter()
            .chain(&self.ys)
            .map(|&v| (v, EventClass::BoundsChanged))
            .collect()
    }

    fn propagate(&self, ctx: &mut PropCtx<'_>) -> PropResult {
        let n = self.xs.len();
        let mut alpha = 0;
        loop {
            while alpha < n {
                let (x, y) = (self.xs[alpha], self.ys[alpha]);
                match (ctx.value(x), ctx.value(y)) {
                    (Some(a), Some(b)) if a == b => alpha += 1,
                    _ => break,
                }
            }
            if alpha == n {
                return if self.strict { Err(Conflict) } else { Ok(Status::Subsumed) };
            }
            let (x, y) = (self.xs[alpha], self.ys[alpha]);
            if ctx.max(x) < ctx.min(y) {
                return Ok(Status::Subsumed);
            }
            let gap = i32::from(self.suffix_blocks(ctx, alpha + 1));
            let a = ctx.set_max(x, ctx.max(y) - gap)?;
            let b = ctx.set_min(y, ctx.min(x) + gap)?;
            if !a && !b {
                return Ok(Status::AtFixpoint);
            }
        }
    }
}
