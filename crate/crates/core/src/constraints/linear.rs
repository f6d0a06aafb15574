//! Bounds propagation for `sum(a_i * x_i) <= c` and `sum(a_i * x_i) = c`.

use crate::domain::{EventClass, Value, VarId};
use crate::propagate::{Conflict, PropCtx, PropResult, Propagator, Status};

/// `floor(n / d)` for any nonzero `d`.
pub(crate) fn div_floor(n: i64, d: i64) -> i64 {
    let q = n / d;
    if (n % d != 0) && ((n < 0) != (d < 0)) {
        q - 1
    } else {
        q
    }
}

/// `ceil(n / d)` for any nonzero `d`.
pub(crate) fn div_ceil(n: i64, d: i64) -> i64 {
    let q = n / d;
    if (n % d != 0) && ((n < 0) == (d < 0)) {
        q + 1
    } else {
        q
    }
}

fn clamp(v: i64) -> Value {
    v.clamp(Value::MIN as i64, Value::MAX as i64) as Value
}

/// One pass of the `<=` rule. Returns whether anything was narrowed.
fn filter_leq(ctx: &mut PropCtx<'_>, terms: &[(i64, VarId)], c: i64) -> Result<bool, Conflict> {
    let term_min = |ctx: &PropCtx<'_>, a: i64, x: VarId| {
        if a > 0 {
            a * ctx.min(x) as i64
        } else {
            a * ctx.max(x) as i64
        }
    };
    let min_sum: i64 = terms.iter().map(|&(a, x)| term_min(ctx, a, x)).sum();
    if min_sum > c {
        return Err(Conflict);
    }
    let slack = c - min_sum;
    let mut changed = false;
    for &(a, x) in terms {
        // a * x <= slack + own minimum contribution
        let bound = slack + term_min(ctx, a, x);
        changed |= if a > 0 {
            ctx.set_max(x, clamp(div_floor(bound, a)))?
        } else {
            ctx.set_min(x, clamp(div_ceil(bound, a)))?
        };
    }
    Ok(changed)
}

fn max_sum(ctx: &PropCtx<'_>, terms: &[(i64, VarId)]) -> i64 {
    terms
        .iter()
        .map(|&(a, x)| if a > 0 { a * ctx.max(x) as i64 } else { a * ctx.min(x) as i64 })
        .sum()
}

/// `sum(a_i * x_i) <= c`
#[derive(Debug, Clone)]
pub struct LinearLeq {
    terms: Vec<(i64, VarId)>,
    c: i64,
}

impl LinearLeq {
    pub fn new(terms: Vec<(i64, VarId)>, c: i64) -> Self {
        Self { terms, c }
    }

    /// `sum(a_i * x_i) >= c`, as the negated `<=`.
    pub fn geq(terms: &[(i64, VarId)], c: i64) -> Self {
        Self { terms: terms.iter().map(|&(a, x)| (-a, x)).collect(), c: -c }
    }
}

impl Propagator for LinearLeq {
    fn name(&self) -> &'static str {
        "linear_leq"
    }

    fn subscriptions(&self) -> Vec<(VarId, EventClass)> {
        self.terms.iter().map(|&(_, x)| (x, EventClass::BoundsChanged)).collect()
    }

    fn propagate(&self, ctx: &mut PropCtx<'_>) -> PropResult {
        while filter_leq(ctx, &self.terms, self.c)? {}
        if max_sum(ctx, &self.terms) <= self.c {
            Ok(Status::Subsumed)
        } else {
            Ok(Status::AtFixpoint)
        }
    }
}

/// `sum(a_i * x_i) = c` in one propagator.
#[derive(Debug, Clone)]
pub struct LinearEq {
    terms: Vec<(i64, VarId)>,
    negated: Vec<(i64, VarId)>,
    c: i64,
}

impl LinearEq {
    pub fn new(terms: Vec<(i64, VarId)>, c: i64) -> Self {
        let negated = terms.iter().map(|&(a, x)| (-a, x)).collect();
        Self { terms, negated, c }
    }
}

impl Propagator for LinearEq {
    fn name(&self) -> &'static str {
        "linear_eq"
    }

    fn subscriptions(&self) -> Vec<(VarId, EventClass)> {
        self.terms.iter().map(|&(_, x)| (x, EventClass::BoundsChanged)).collect()
    }

    fn propagate(&self, ctx: &mut PropCtx<'_>) -> PropResult {
        loop {
            let a = filter_leq(ctx, &self.terms, self.c)?;
            let b = filter_leq(ctx, &self.negated, -self.c)?;
            if !a && !b {
                break;
            }
        }
        if self.terms.iter().all(|&(_, x)| ctx.is_fixed(x)) {
            Ok(Status::Subsumed)
        } else {
            Ok(Status::AtFixpoint)
        }
    }
}
