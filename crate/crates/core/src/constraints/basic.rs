use crate::domain::{EventClass, Value, VarId};
use crate::propagate::{PropCtx, PropResult, Propagator, Status};

/// `x != c`
#[derive(Debug, Clone)]
pub struct NotEqualConst {
    pub x: VarId,
    pub c: Value,
}

impl Propagator for NotEqualConst {
    fn name(&self) -> &'static str {
        "ne_const"
    }
    fn subscriptions(&self) -> Vec<(VarId, EventClass)> {
        Vec::new()
    }
    fn propagate(&self, ctx: &mut PropCtx<'_>) -> PropResult {
        ctx.remove(self.x, self.c)?;
        Ok(Status::Subsumed)
    }
}

/// `x = c`
#[derive(Debug, Clone)]
pub struct EqualConst {
    pub x: VarId,
    pub c: Value,
}

impl Propagator for EqualConst {
    fn name(&self) -> &'static str {
        "eq_const"
    }
    fn subscriptions(&self) -> Vec<(VarId, EventClass)> {
        Vec::new()
    }
    fn propagate(&self, ctx: &mut PropCtx<'_>) -> PropResult {
        ctx.assign(self.x, self.c)?;
        Ok(Status::Subsumed)
    }
}

/// `x <= ub`, posted by branch and bound.
///
/// Never reports subsumption: a restored state may predate the bound, so the
/// search reschedules it after every restoration.
#[derive(Debug, Clone)]
pub struct UpperBound {
    pub x: VarId,
    pub ub: Value,
}

impl Propagator for UpperBound {
    fn name(&self) -> &'static str {
        "upper_bound"
    }
    fn subscriptions(&self) -> Vec<(VarId, EventClass)> {
        Vec::new()
    }
    fn propagate(&self, ctx: &mut PropCtx<'_>) -> PropResult {
        ctx.set_max(self.x, self.ub)?;
        Ok(Status::AtFixpoint)
    }
}

/// `x + offset <= y`; offset 1 gives `x < y`.
#[derive(Debug, Clone)]
pub struct LessEq {
    pub x: VarId,
    pub y: VarId,
    pub offset: Value,
}

impl Propagator for LessEq {
    fn name(&self) -> &'static str {
        "le"
    }
    fn subscriptions(&self) -> Vec<(VarId, EventClass)> {
        vec![(self.x, EventClass::BoundsChanged), (self.y, EventClass::BoundsChanged)]
    }
    fn propagate(&self, ctx: &mut PropCtx<'_>) -> PropResult {
        ctx.set_max(self.x, ctx.max(self.y) - self.offset)?;
        ctx.set_min(self.y, ctx.min(self.x) + self.offset)?;
        if ctx.max(self.x) + self.offset <= ctx.min(self.y) {
            Ok(Status::Subsumed)
        } else {
            Ok(Status::AtFixpoint)
        }
    }
}

/// `z = x /\ y` over 0/1 variables of either representation.
#[derive(Debug, Clone)]
pub struct BoolAnd {
    pub z: VarId,
    pub x: VarId,
    pub y: VarId,
}

impl Propagator for BoolAnd {
    fn name(&self) -> &'static str {
        "bool_and"
    }
    fn subscriptions(&self) -> Vec<(VarId, EventClass)> {
        [self.z, self.x, self.y].map(|v| (v, EventClass::Instantiated)).to_vec()
    }
    fn propagate(&self, ctx: &mut PropCtx<'_>) -> PropResult {
        let (z, x, y) = (self.z, self.x, self.y);
        loop {
            let mut changed = false;
            if ctx.min(z) == 1 {
                changed |= ctx.set_min(x, 1)?;
                changed |= ctx.set_min(y, 1)?;
            }
            if ctx.max(x) == 0 || ctx.max(y) == 0 {
                changed |= ctx.set_max(z, 0)?;
            }
            if ctx.min(x) == 1 && ctx.min(y) == 1 {
                changed |= ctx.set_min(z, 1)?;
            }
            if ctx.max(z) == 0 {
                if ctx.min(x) == 1 {
                    changed |= ctx.set_max(y, 0)?;
                }
                if ctx.min(y) == 1 {
                    changed |= ctx.set_max(x, 0)?;
                }
            }
            if !changed {
                break;
            }
        }
        let done = (ctx.is_fixed(z) && ctx.is_fixed(x) && ctx.is_fixed(y))
            || (ctx.max(z) == 0 && (ctx.max(x) == 0 || ctx.max(y) == 0));
        Ok(if done { Status::Subsumed } else { Status::AtFixpoint })
    }
}
