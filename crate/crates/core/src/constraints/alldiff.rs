use crate::domain::{EventClass, Value, VarId};
use crate::propagate::{Conflict, PropCtx, PropResult, Propagator, Status};

/// Value-consistent alldifferent: the value of every instantiated variable is
/// removed from all the others.
#[derive(Debug, Clone)]
pub struct AllDifferent {
    vars: Vec<VarId>,
}

impl AllDifferent {
    pub fn new(vars: Vec<VarId>) -> Self {
        Self { vars }
    }
}

impl Propagator for AllDifferent {
    fn name(&self) -> &'static str {
        "alldifferent"
    }

    fn subscriptions(&self) -> Vec<(VarId, EventClass)> {
        self.vars.iter().map(|&x| (x, EventClass::Instantiated)).collect()
    }

    fn propagate(&self, ctx: &mut PropCtx<'_>) -> PropResult {
        let mut fixed: Vec<Value> = Vec::with_capacity(self.vars.len());
        let mut free: Vec<VarId> = Vec::with_capacity(self.vars.len());
        for &x in &self.vars {
            match ctx.value(x) {
                Some(v) => fixed.push(v),
                None => free.push(x),
            }
        }
        fixed.sort_unstable();
        if fixed.windows(2).any(|w| w[0] == w[1]) {
            return Err(Conflict);
        }
        // Values whose removal still has to be pushed to `free`.
        let mut pending = fixed;
        while !pending.is_empty() {
            let mut newly = Vec::new();
            let mut i = 0;
            while i < free.len() {
                let x = free[i];
                for &v in &pending {
                    ctx.remove(x, v)?;
                }
                if let Some(v) = ctx.value(x) {
                    newly.push(v);
                    free.swap_remove(i);
                } else {
                    i += 1;
                }
            }
            newly.sort_unstable();
            if newly.windows(2).any(|w| w[0] == w[1]) {
                return Err(Conflict);
            }
            pending = newly;
        }
        Ok(if free.is_empty() { Status::Subsumed } else { Status::AtFixpoint })
    }
}
