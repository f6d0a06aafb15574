//! The constraint catalog and the `post_*` calls that add it to a [`Model`].
//!
//! Each call returns the number of constraints it counts towards the model
//! total. A `SumMode::Decomposed` equality counts twice because it is posted
//! as separate `<=` and `>=` halves.

mod alldiff;
mod basic;
mod bool_sum;
mod lex;
mod linear;

pub use alldiff::AllDifferent;
pub use basic::{BoolAnd, EqualConst, LessEq, NotEqualConst, UpperBound};
pub use bool_sum::BoolSum;
pub use lex::LexLeq;
pub use linear::{LinearEq, LinearLeq};

use crate::domain::{Value, VarId, VarKind};
use crate::model::{ConstraintKind, Model, ModelError};
use crate::propagate::Propagator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LinearTerm {
    pub coeff: i64,
    pub var: VarId,
}

impl LinearTerm {
    pub fn new(coeff: i64, var: VarId) -> Self {
        Self { coeff, var }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rel {
    Eq,
    Leq,
    Geq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SumMode {
    /// One propagator per equality.
    #[default]
    NativeEquals,
    /// Equalities become a `<=` propagator plus a `>=` propagator.
    Decomposed,
}

impl SumMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SumMode::NativeEquals => "native",
            SumMode::Decomposed => "decomposed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BoolMode {
    /// Packed Boolean variables with counting sums.
    #[default]
    NativeBool,
    /// Integer variables with domain `{0..1}` and linear sums.
    IntZeroOne,
}

impl BoolMode {
    pub fn as_str(self) -> &'static str {
        match self {
            BoolMode::NativeBool => "native",
            BoolMode::IntZeroOne => "int",
        }
    }
}

/// Largest magnitude any partial sum may reach; leaves headroom for the
/// slack arithmetic in the linear propagator.
const LINEAR_LIMIT: i128 = (i64::MAX / 4) as i128;

impl Model {
    fn check_int(&self, x: VarId) -> Result<(), ModelError> {
        match x.kind() {
            VarKind::Int => Ok(()),
            VarKind::Bool => Err(ModelError::NotInteger(x)),
        }
    }

    fn check_zero_one(&self, x: VarId, mode: BoolMode) -> Result<(), ModelError> {
        match (mode, x.kind()) {
            (BoolMode::NativeBool, VarKind::Bool) => Ok(()),
            (BoolMode::NativeBool, VarKind::Int) => Err(ModelError::NotBoolean(x)),
            (BoolMode::IntZeroOne, VarKind::Int)
                if self.store().min(x) >= 0 && self.store().max(x) <= 1 =>
            {
                Ok(())
            }
            (BoolMode::IntZeroOne, _) => Err(ModelError::NotZeroOne(x)),
        }
    }

    /// Bounds-consistent `sum(coeff * var) rel c`.
    pub fn post_linear(
        &mut self,
        terms: &[LinearTerm],
        rel: Rel,
        c: i64,
        mode: SumMode,
    ) -> Result<usize, ModelError> {
        if terms.is_empty() {
            return Err(ModelError::Empty("linear constraint"));
        }
        let mut magnitude = (c as i128).abs();
        for t in terms {
            if t.coeff == 0 {
                return Err(ModelError::ZeroCoefficient(t.var));
            }
            let s = self.store();
            let reach = (s.min(t.var) as i128).abs().max((s.max(t.var) as i128).abs());
            magnitude += (t.coeff as i128).abs() * reach;
        }
        if magnitude > LINEAR_LIMIT {
            return Err(ModelError::Overflow);
        }
        let raw: Vec<(i64, VarId)> = terms.iter().map(|t| (t.coeff, t.var)).collect();
        let props: Vec<Box<dyn Propagator>> = match (rel, mode) {
            (Rel::Eq, SumMode::NativeEquals) => vec![Box::new(LinearEq::new(raw, c))],
            (Rel::Eq, SumMode::Decomposed) => vec![
                Box::new(LinearLeq::geq(&raw, c)),
                Box::new(LinearLeq::new(raw, c)),
            ],
            (Rel::Leq, _) => vec![Box::new(LinearLeq::new(raw, c))],
            (Rel::Geq, _) => vec![Box::new(LinearLeq::geq(&raw, c))],
        };
        let priority = self.priorities().linear;
        self.post_all(ConstraintKind::Linear, props, priority)
    }

    /// Sum of 0/1 variables. Native Booleans get the counting propagator,
    /// `{0..1}` integers go through [`Model::post_linear`].
    pub fn post_bool_sum(
        &mut self,
        vars: &[VarId],
        rel: Rel,
        c: i64,
        bool_mode: BoolMode,
        sum_mode: SumMode,
    ) -> Result<usize, ModelError> {
        if vars.is_empty() {
            return Err(ModelError::Empty("Boolean sum"));
        }
        for &x in vars {
            self.check_zero_one(x, bool_mode)?;
        }
        match bool_mode {
            BoolMode::IntZeroOne => {
                let terms: Vec<_> = vars.iter().map(|&x| LinearTerm::new(1, x)).collect();
                self.post_linear(&terms, rel, c, sum_mode)
            }
            BoolMode::NativeBool => {
                let v = vars.to_vec();
                let props: Vec<Box<dyn Propagator>> = match (rel, sum_mode) {
                    (Rel::Eq, SumMode::Decomposed) => vec![
                        Box::new(BoolSum::new(v.clone(), Rel::Geq, c)),
                        Box::new(BoolSum::new(v, Rel::Leq, c)),
                    ],
                    _ => vec![Box::new(BoolSum::new(v, rel, c))],
                };
                let priority = self.priorities().linear;
                self.post_all(ConstraintKind::BoolSum, props, priority)
            }
        }
    }

    pub fn post_alldifferent(&mut self, vars: &[VarId]) -> Result<usize, ModelError> {
        if vars.len() < 2 {
            return Err(ModelError::TooFew { what: "alldifferent", min: 2, got: vars.len() });
        }
        let priority = self.priorities().global;
        self.post_propagator(
            ConstraintKind::AllDifferent,
            Box::new(AllDifferent::new(vars.to_vec())),
            priority,
        )?;
        Ok(1)
    }

    pub fn post_ne_const(&mut self, x: VarId, c: Value) -> Result<usize, ModelError> {
        self.check_int(x)?;
        let priority = self.priorities().cheap;
        self.post_propagator(ConstraintKind::NotEqualConst, Box::new(NotEqualConst { x, c }), priority)?;
        Ok(1)
    }

    pub fn post_eq_const(&mut self, x: VarId, c: Value) -> Result<usize, ModelError> {
        let priority = self.priorities().cheap;
        self.post_propagator(ConstraintKind::EqualConst, Box::new(EqualConst { x, c }), priority)?;
        Ok(1)
    }

    /// `x <= y`, or `x < y` when `strict`.
    pub fn post_le(&mut self, x: VarId, y: VarId, strict: bool) -> Result<usize, ModelError> {
        self.check_int(x)?;
        self.check_int(y)?;
        let priority = self.priorities().cheap;
        let prop = LessEq { x, y, offset: Value::from(strict) };
        self.post_propagator(ConstraintKind::LessEq, Box::new(prop), priority)?;
        Ok(1)
    }

    /// `z = x /\ y`.
    pub fn post_bool_and(&mut self, z: VarId, x: VarId, y: VarId) -> Result<usize, ModelError> {
        let mode = if z.is_bool() { BoolMode::NativeBool } else { BoolMode::IntZeroOne };
        for v in [z, x, y] {
            self.check_zero_one(v, mode)?;
        }
        let priority = self.priorities().cheap;
        self.post_propagator(ConstraintKind::BoolAnd, Box::new(BoolAnd { z, x, y }), priority)?;
        Ok(1)
    }

    /// `xs <=lex ys`, or `xs <lex ys` when `strict`.
    pub fn post_lex_leq(
        &mut self,
        xs: &[VarId],
        ys: &[VarId],
        strict: bool,
    ) -> Result<usize, ModelError> {
        if xs.len() != ys.len() {
            return Err(ModelError::LengthMismatch(xs.len(), ys.len()));
        }
        if xs.is_empty() {
            return Err(ModelError::Empty("lex constraint"));
        }
        let priority = self.priorities().global;
        let prop = LexLeq::new(xs.to_vec(), ys.to_vec(), strict);
        self.post_propagator(ConstraintKind::Lex, Box::new(prop), priority)?;
        Ok(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::NoRecord;
    use crate::propagate::Failure;

    fn fixpoint(m: &mut Model) -> Result<(), Failure> {
        m.space.propagate(&mut NoRecord)
    }

    #[test]
    fn linear_sum_bounds() {
        let mut m = Model::new();
        let x = m.new_int_var(0, 5).unwrap();
        let y = m.new_int_var(4, 9).unwrap();
        let n = m
            .post_linear(&[LinearTerm::new(1, x), LinearTerm::new(1, y)], Rel::Eq, 5, SumMode::NativeEquals)
            .unwrap();
        assert_eq!(n, 1);
        fixpoint(&mut m).unwrap();
        assert_eq!(m.store().values(x), vec![0, 1]);
        assert_eq!(m.store().values(y), vec![4, 5]);
    }

    #[test]
    fn decomposed_eq_counts_two() {
        let mut m = Model::new();
        let x = m.new_int_var(0, 5).unwrap();
        let y = m.new_int_var(4, 9).unwrap();
        let terms = [LinearTerm::new(1, x), LinearTerm::new(1, y)];
        assert_eq!(m.post_linear(&terms, Rel::Eq, 5, SumMode::Decomposed).unwrap(), 2);
        assert_eq!(m.post_linear(&terms, Rel::Leq, 5, SumMode::Decomposed).unwrap(), 1);
        fixpoint(&mut m).unwrap();
        assert_eq!(m.store().values(x), vec![0, 1]);
        assert_eq!(m.store().values(y), vec![4, 5]);
    }

    #[test]
    fn linear_rejects_bad_input() {
        let mut m = Model::new();
        let x = m.new_int_var(0, 5).unwrap();
        assert_eq!(m.post_linear(&[], Rel::Eq, 0, SumMode::NativeEquals), Err(ModelError::Empty("linear constraint")));
        assert_eq!(
            m.post_linear(&[LinearTerm::new(0, x)], Rel::Eq, 0, SumMode::NativeEquals),
            Err(ModelError::ZeroCoefficient(x))
        );
        let big = m.new_int_var(-1000, 1000).unwrap();
        assert_eq!(
            m.post_linear(&[LinearTerm::new(i64::MAX / 8, big)], Rel::Leq, 0, SumMode::NativeEquals),
            Err(ModelError::Overflow)
        );
    }

    #[test]
    fn negative_coefficients() {
        // 2x - 3y <= -4, x in 0..10, y in 0..3  →  y >= 2 (x >= 0), x <= 2 (y <= 3)
        let mut m = Model::new();
        let x = m.new_int_var(0, 10).unwrap();
        let y = m.new_int_var(0, 3).unwrap();
        m.post_linear(&[LinearTerm::new(2, x), LinearTerm::new(-3, y)], Rel::Leq, -4, SumMode::NativeEquals)
            .unwrap();
        fixpoint(&mut m).unwrap();
        assert_eq!(m.store().values(y), vec![2, 3]);
        assert_eq!(m.store().values(x), vec![0, 1, 2]);
    }

    #[test]
    fn alldifferent_examples() {
        let mut m = Model::new();
        let a = m.new_int_var(1, 1).unwrap();
        let b = m.new_int_var(1, 2).unwrap();
        let c = m.new_int_var(1, 3).unwrap();
        m.post_alldifferent(&[a, b, c]).unwrap();
        fixpoint(&mut m).unwrap();
        assert_eq!([m.store().value(a), m.store().value(b), m.store().value(c)], [Some(1), Some(2), Some(3)]);

        let mut m = Model::new();
        let a = m.new_int_var(7, 7).unwrap();
        let b = m.new_int_var(7, 7).unwrap();
        m.post_alldifferent(&[a, b]).unwrap();
        assert_eq!(fixpoint(&mut m), Err(Failure));

        let mut m = Model::new();
        let a = m.new_int_var(7, 7).unwrap();
        assert!(m.post_alldifferent(&[a]).is_err());
    }

    #[test]
    fn ne_const_examples() {
        let mut m = Model::new();
        let d = m.new_int_var(-3, 3).unwrap();
        m.post_ne_const(d, 2).unwrap();
        m.post_ne_const(d, 9).unwrap();
        fixpoint(&mut m).unwrap();
        assert_eq!(m.store().values(d), vec![-3, -2, -1, 0, 1, 3]);
        assert!(m.engine().is_subsumed(m.constraints()[0].prop));
        assert!(m.engine().is_subsumed(m.constraints()[1].prop));
        let b = m.new_bool_var();
        assert_eq!(m.post_ne_const(b, 0), Err(ModelError::NotInteger(b)));
    }

    fn and_case(z: Option<i32>, x: Option<i32>, y: Option<i32>, mode: BoolMode) -> Option<[i32; 3]> {
        let mut m = Model::new();
        let vz = m.new_boolean(mode);
        let vx = m.new_boolean(mode);
        let vy = m.new_boolean(mode);
        for (v, val) in [(vz, z), (vx, x), (vy, y)] {
            if let Some(val) = val {
                m.post_eq_const(v, val).unwrap();
            }
        }
        m.post_bool_and(vz, vx, vy).unwrap();
        fixpoint(&mut m).ok()?;
        let s = m.store();
        Some([vz, vx, vy].map(|v| s.value(v).unwrap_or(-1)))
    }

    #[test]
    fn bool_and_examples() {
        for mode in [BoolMode::NativeBool, BoolMode::IntZeroOne] {
            assert_eq!(and_case(None, Some(1), Some(1), mode), Some([1, 1, 1]));
            assert_eq!(and_case(Some(1), None, None, mode), Some([1, 1, 1]));
            assert_eq!(and_case(Some(0), Some(1), None, mode), Some([0, 1, 0]));
            assert_eq!(and_case(None, Some(0), None, mode), Some([0, 0, -1]));
            assert_eq!(and_case(Some(1), Some(0), None, mode), None);
        }
    }

    #[test]
    fn bool_sum_examples() {
        for mode in [BoolMode::NativeBool, BoolMode::IntZeroOne] {
            let mut m = Model::new();
            let vs: Vec<_> = (0..4).map(|_| m.new_boolean(mode)).collect();
            m.post_bool_sum(&vs, Rel::Eq, 4, mode, SumMode::NativeEquals).unwrap();
            fixpoint(&mut m).unwrap();
            assert!(vs.iter().all(|&v| m.store().value(v) == Some(1)));

            let mut m = Model::new();
            let vs: Vec<_> = (0..4).map(|_| m.new_boolean(mode)).collect();
            m.post_bool_sum(&vs, Rel::Geq, -1, mode, SumMode::NativeEquals).unwrap();
            fixpoint(&mut m).unwrap();
            assert!(m.engine().is_subsumed(m.constraints()[0].prop));

            let mut m = Model::new();
            let vs: Vec<_> = (0..4).map(|_| m.new_boolean(mode)).collect();
            m.post_bool_sum(&vs, Rel::Leq, -1, mode, SumMode::NativeEquals).unwrap();
            assert_eq!(fixpoint(&mut m), Err(Failure));
        }
    }

    #[test]
    fn bool_sum_checks_representation() {
        let mut m = Model::new();
        let b = m.new_bool_var();
        let i = m.new_int_var(0, 2).unwrap();
        assert_eq!(
            m.post_bool_sum(&[b], Rel::Eq, 1, BoolMode::IntZeroOne, SumMode::NativeEquals),
            Err(ModelError::NotZeroOne(b))
        );
        assert_eq!(
            m.post_bool_sum(&[i], Rel::Eq, 1, BoolMode::NativeBool, SumMode::NativeEquals),
            Err(ModelError::NotBoolean(i))
        );
    }

    #[test]
    fn le_examples() {
        let mut m = Model::new();
        let x = m.new_int_var(0, 9).unwrap();
        let y = m.new_int_var(0, 4).unwrap();
        m.post_le(x, y, false).unwrap();
        fixpoint(&mut m).unwrap();
        assert_eq!((m.store().min(x), m.store().max(x)), (0, 4));

        let mut m = Model::new();
        let x = m.new_int_var(0, 9).unwrap();
        let y = m.new_int_var(0, 4).unwrap();
        m.post_le(x, y, true).unwrap();
        fixpoint(&mut m).unwrap();
        assert_eq!(m.store().max(x), 3);
        assert_eq!(m.store().min(y), 1);
    }

    #[test]
    fn lex_examples() {
        let mut m = Model::new();
        let one = m.new_int_var(1, 1).unwrap();
        let free = m.new_int_var(0, 1).unwrap();
        let one_b = m.new_int_var(1, 1).unwrap();
        let zero = m.new_int_var(0, 0).unwrap();
        m.post_lex_leq(&[one, free], &[one_b, zero], true).unwrap();
        assert_eq!(fixpoint(&mut m), Err(Failure));

        let mut m = Model::new();
        let a = m.new_int_var(1, 1).unwrap();
        let b = m.new_int_var(1, 1).unwrap();
        m.post_lex_leq(&[a], &[b], false).unwrap();
        fixpoint(&mut m).unwrap();
        assert!(m.engine().is_subsumed(m.constraints()[0].prop));

        assert_eq!(m.post_lex_leq(&[a], &[], false), Err(ModelError::LengthMismatch(1, 0)));
    }
}
