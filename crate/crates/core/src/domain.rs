//! The variable store.
//!
//! Every restorable bit of domain state lives in a single `Vec<u64>` region so
//! that a copying backend can snapshot the whole store with one memcpy, and a
//! trailing backend can undo any mutation by writing back a handful of words.
//!
//! Integer variables occupy `2 + ceil(span / 64)` words:
//!
//! ```text
//! [ lo_off:u32 | hi_off:u32 ] [ size ] [ bits ... ]
//! ```
//!
//! where offsets are relative to the variable's original lower bound and bit
//! `k` stands for value `base + k`. Bits outside `[lo, hi]` are always zero, so
//! two stores holding the same domains are bit-identical no matter which
//! sequence of narrowings produced them.
//!
//! Boolean variables take two bits each, 32 to a word: bit 0 is set once the
//! value `0` has been removed, bit 1 once `1` has been removed.

use std::fmt;

use smallvec::SmallVec;
use thiserror::Error;

use crate::restore::TrailEntry;

/// Domain values. Linear arithmetic over them is carried out in `i64`.
pub type Value = i32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKind {
    Int,
    Bool,
}

/// Identity of a variable inside one [`VariableStore`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId {
    index: u32,
    kind: VarKind,
}

impl VarId {
    /// Position of the variable in creation order; unique per store.
    pub fn index(self) -> usize {
        self.index as usize
    }

    pub fn kind(self) -> VarKind {
        self.kind
    }

    pub fn is_bool(self) -> bool {
        self.kind == VarKind::Bool
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            VarKind::Int => write!(f, "x{}", self.index),
            VarKind::Bool => write!(f, "b{}", self.index),
        }
    }
}

/// Wake-up granularity of a domain change, weakest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EventClass {
    DomainChanged,
    BoundsChanged,
    Instantiated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DomainEvent {
    pub var: VarId,
    pub class: EventClass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    RemoveValue(Value),
    TightenMin(Value),
    TightenMax(Value),
    Assign(Value),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Narrowing {
    Narrowed(DomainEvent),
    NoChange,
    /// The action would empty the domain. The domain is left untouched and the
    /// caller must abandon the current fixpoint.
    Failed,
}

impl Narrowing {
    pub fn is_narrowed(&self) -> bool {
        matches!(self, Narrowing::Narrowed(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoolState {
    Unknown,
    True,
    False,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("empty initial domain [{lo}..{hi}]")]
    EmptyDomain { lo: Value, hi: Value },
    #[error("domain [{lo}..{hi}] is too wide")]
    TooWide { lo: Value, hi: Value },
}

/// Observer of store mutations, invoked with the pre-change words before the
/// change becomes visible.
pub trait Recorder {
    /// When false the store skips building trail entries altogether.
    fn is_recording(&self) -> bool;
    fn record(&mut self, entry: TrailEntry);
}

/// A recorder that ignores everything.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoRecord;

impl Recorder for NoRecord {
    fn is_recording(&self) -> bool {
        false
    }
    fn record(&mut self, _entry: TrailEntry) {}
}

#[derive(Debug, Clone, Copy)]
struct IntSlot {
    offset: u32,
    base: Value,
    words: u32,
}

const BOOLS_PER_WORD: u32 = 32;
const ZERO_GONE: u64 = 0b01;
const ONE_GONE: u64 = 0b10;
const MAX_SPAN: i64 = 1 << 24;

/// All variable domains of one search, in one restorable region.
#[derive(Debug, Clone, Default)]
pub struct VariableStore {
    region: Vec<u64>,
    /// Global variable index to kind-local slot.
    slots: Vec<u32>,
    kinds: Vec<VarKind>,
    ints: Vec<IntSlot>,
    /// Region offset of each word holding Booleans.
    bool_words: Vec<u32>,
    n_bools: u32,
    depth: u32,
}

/// Read-only view of one integer domain.
#[derive(Clone, Copy)]
pub struct IntDomain<'a> {
    base: Value,
    lo: Value,
    hi: Value,
    size: u32,
    bits: &'a [u64],
}

impl<'a> IntDomain<'a> {
    pub fn min(&self) -> Value {
        self.lo
    }
    pub fn max(&self) -> Value {
        self.hi
    }
    pub fn size(&self) -> u32 {
        self.size
    }
    pub fn contains(&self, v: Value) -> bool {
        if v < self.lo || v > self.hi {
            return false;
        }
        let k = (v - self.base) as usize;
        self.bits[k / 64] >> (k % 64) & 1 == 1
    }
    pub fn values(&self) -> impl Iterator<Item = Value> + 'a {
        let (base, bits) = (self.base, self.bits);
        bits.iter().enumerate().flat_map(move |(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros();
                rest &= rest - 1;
                Some(base + (w as u32 * 64 + b) as Value)
            })
        })
    }
}

impl fmt::Debug for IntDomain<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.values()).finish()
    }
}

impl VariableStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn new_int_var(&mut self, lo: Value, hi: Value) -> Result<VarId, DomainError> {
        if lo > hi {
            return Err(DomainError::EmptyDomain { lo, hi });
        }
        let span = hi as i64 - lo as i64 + 1;
        if span > MAX_SPAN {
            return Err(DomainError::TooWide { lo, hi });
        }
        let span = span as u32;
        let words = span.div_ceil(64);
        let offset = self.region.len() as u32;
        self.region.push(((span - 1) as u64) << 32);
        self.region.push(span as u64);
        for w in 0..words {
            let left = span - w * 64;
            self.region.push(if left >= 64 { u64::MAX } else { (1u64 << left) - 1 });
        }
        let var = VarId { index: self.slots.len() as u32, kind: VarKind::Int };
        self.slots.push(self.ints.len() as u32);
        self.kinds.push(VarKind::Int);
        self.ints.push(IntSlot { offset, base: lo, words });
        Ok(var)
    }

    pub fn new_bool_var(&mut self) -> VarId {
        let slot = self.n_bools;
        if slot.is_multiple_of(BOOLS_PER_WORD) {
            self.bool_words.push(self.region.len() as u32);
            self.region.push(0);
        }
        self.n_bools += 1;
        let var = VarId { index: self.slots.len() as u32, kind: VarKind::Bool };
        self.slots.push(slot);
        self.kinds.push(VarKind::Bool);
        var
    }

    pub fn num_vars(&self) -> usize {
        self.slots.len()
    }
    pub fn num_int_vars(&self) -> usize {
        self.ints.len()
    }
    pub fn num_bool_vars(&self) -> usize {
        self.n_bools as usize
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }
    pub fn set_depth(&mut self, depth: u32) {
        self.depth = depth;
    }

    /// Looks a variable up by creation index.
    pub fn var(&self, index: usize) -> VarId {
        VarId { index: index as u32, kind: self.kinds[index] }
    }

    /// Raw restorable region.
    pub fn region(&self) -> &[u64] {
        &self.region
    }
    pub fn region_bytes(&self) -> usize {
        self.region.len() * std::mem::size_of::<u64>()
    }
    pub fn capture_into(&self, buf: &mut Vec<u64>) {
        buf.clear();
        buf.extend_from_slice(&self.region);
    }
    /// Overwrites every domain with a previously captured image.
    pub fn load(&mut self, image: &[u64]) {
        self.region.copy_from_slice(image);
    }
    /// Writes back the words saved in a trail entry.
    pub fn undo(&mut self, entry: &TrailEntry) {
        for &(idx, old) in entry.words.iter().rev() {
            self.region[idx as usize] = old;
        }
    }

    #[inline]
    fn int_slot(&self, var: VarId) -> IntSlot {
        debug_assert_eq!(var.kind, VarKind::Int);
        self.ints[self.slots[var.index as usize] as usize]
    }

    #[inline]
    fn bool_pos(&self, var: VarId) -> (usize, u32) {
        debug_assert_eq!(var.kind, VarKind::Bool);
        let slot = self.slots[var.index as usize];
        let word = self.bool_words[(slot / BOOLS_PER_WORD) as usize] as usize;
        (word, (slot % BOOLS_PER_WORD) * 2)
    }

    #[inline]
    fn bool_bits(&self, var: VarId) -> u64 {
        let (w, shift) = self.bool_pos(var);
        self.region[w] >> shift & 0b11
    }

    #[inline]
    fn header(&self, s: IntSlot) -> (Value, Value, u32) {
        let h = self.region[s.offset as usize];
        let lo = s.base + (h as u32) as Value;
        let hi = s.base + ((h >> 32) as u32) as Value;
        (lo, hi, self.region[s.offset as usize + 1] as u32)
    }

    pub fn int_domain(&self, var: VarId) -> IntDomain<'_> {
        let s = self.int_slot(var);
        let (lo, hi, size) = self.header(s);
        let start = s.offset as usize + 2;
        IntDomain {
            base: s.base,
            lo,
            hi,
            size,
            bits: &self.region[start..start + s.words as usize],
        }
    }

    pub fn bool_state(&self, var: VarId) -> BoolState {
        match self.bool_bits(var) {
            0 => BoolState::Unknown,
            ZERO_GONE => BoolState::True,
            _ => BoolState::False,
        }
    }

    #[inline]
    pub fn min(&self, var: VarId) -> Value {
        match var.kind {
            VarKind::Int => self.header(self.int_slot(var)).0,
            VarKind::Bool => (self.bool_bits(var) & ZERO_GONE) as Value,
        }
    }

    #[inline]
    pub fn max(&self, var: VarId) -> Value {
        match var.kind {
            VarKind::Int => self.header(self.int_slot(var)).1,
            VarKind::Bool => (self.bool_bits(var) & ONE_GONE == 0) as Value,
        }
    }

    pub fn size(&self, var: VarId) -> u32 {
        match var.kind {
            VarKind::Int => self.header(self.int_slot(var)).2,
            VarKind::Bool => 2 - self.bool_bits(var).count_ones(),
        }
    }

    #[inline]
    pub fn is_fixed(&self, var: VarId) -> bool {
        match var.kind {
            VarKind::Int => self.header(self.int_slot(var)).2 == 1,
            VarKind::Bool => self.bool_bits(var) != 0,
        }
    }

    pub fn value(&self, var: VarId) -> Option<Value> {
        self.is_fixed(var).then(|| self.min(var))
    }

    pub fn contains(&self, var: VarId, v: Value) -> bool {
        match var.kind {
            VarKind::Int => self.int_domain(var).contains(v),
            VarKind::Bool => match v {
                0 => self.bool_bits(var) & ZERO_GONE == 0,
                1 => self.bool_bits(var) & ONE_GONE == 0,
                _ => false,
            },
        }
    }

    /// Every value currently in the domain, ascending.
    pub fn values(&self, var: VarId) -> Vec<Value> {
        match var.kind {
            VarKind::Int => self.int_domain(var).values().collect(),
            VarKind::Bool => (0..=1).filter(|&v| self.contains(var, v)).collect(),
        }
    }

    /// The single entry point for domain mutations.
    pub fn narrow<R: Recorder + ?Sized>(
        &mut self,
        var: VarId,
        action: Action,
        rec: &mut R,
    ) -> Narrowing {
        match var.kind {
            VarKind::Int => self.narrow_int(var, action, rec),
            VarKind::Bool => self.narrow_bool(var, action, rec),
        }
    }

    fn narrow_bool<R: Recorder + ?Sized>(
        &mut self,
        var: VarId,
        action: Action,
        rec: &mut R,
    ) -> Narrowing {
        let (w, shift) = self.bool_pos(var);
        let cur = self.region[w] >> shift & 0b11;
        // Values that must go, as a removal mask.
        let remove = match action {
            Action::RemoveValue(0) => ZERO_GONE,
            Action::RemoveValue(1) => ONE_GONE,
            Action::RemoveValue(_) => 0,
            Action::Assign(0) | Action::TightenMax(0) => ONE_GONE,
            Action::Assign(1) | Action::TightenMin(1) => ZERO_GONE,
            Action::Assign(_) => 0b11,
            Action::TightenMin(m) if m <= 0 => 0,
            Action::TightenMin(_) => 0b11,
            Action::TightenMax(m) if m >= 1 => 0,
            Action::TightenMax(_) => 0b11,
        };
        let next = cur | remove;
        if next == cur {
            return Narrowing::NoChange;
        }
        if next == 0b11 {
            return Narrowing::Failed;
        }
        if rec.is_recording() {
            rec.record(TrailEntry::single(var, w as u32, self.region[w]));
        }
        self.region[w] |= remove << shift;
        Narrowing::Narrowed(DomainEvent { var, class: EventClass::Instantiated })
    }

    fn narrow_int<R: Recorder + ?Sized>(
        &mut self,
        var: VarId,
        action: Action,
        rec: &mut R,
    ) -> Narrowing {
        let s = self.int_slot(var);
        let (lo, hi, size) = self.header(s);
        let bits = s.offset as usize + 2;
        let word_of = |v: Value| bits + (v - s.base) as usize / 64;

        let (new_lo, new_hi, clear_from, clear_to) = match action {
            Action::RemoveValue(v) => {
                if v < lo || v > hi || !self.bit(s, v) {
                    return Narrowing::NoChange;
                }
                if size == 1 {
                    return Narrowing::Failed;
                }
                let new_lo = if v == lo { self.next_member(s, v + 1) } else { lo };
                let new_hi = if v == hi { self.prev_member(s, v - 1) } else { hi };
                (new_lo, new_hi, v, v)
            }
            Action::TightenMin(m) => {
                if m <= lo {
                    return Narrowing::NoChange;
                }
                if m > hi {
                    return Narrowing::Failed;
                }
                let new_lo = self.next_member(s, m);
                (new_lo, hi, lo, new_lo - 1)
            }
            Action::TightenMax(m) => {
                if m >= hi {
                    return Narrowing::NoChange;
                }
                if m < lo {
                    return Narrowing::Failed;
                }
                let new_hi = self.prev_member(s, m);
                (lo, new_hi, new_hi + 1, hi)
            }
            Action::Assign(v) => {
                if v < lo || v > hi || !self.bit(s, v) {
                    return Narrowing::Failed;
                }
                if size == 1 {
                    return Narrowing::NoChange;
                }
                // Clear everything, then set v back below.
                (v, v, lo, hi)
            }
        };

        let (w_from, w_to) = (word_of(clear_from), word_of(clear_to));
        if rec.is_recording() {
            let mut words: SmallVec<[(u32, u64); 4]> = SmallVec::new();
            words.push((s.offset, self.region[s.offset as usize]));
            words.push((s.offset + 1, self.region[s.offset as usize + 1]));
            for w in w_from..=w_to {
                words.push((w as u32, self.region[w]));
            }
            rec.record(TrailEntry { var, words });
        }

        let mut removed = 0u32;
        for w in w_from..=w_to {
            let first = if w == w_from { (clear_from - s.base) as u32 % 64 } else { 0 };
            let last = if w == w_to { (clear_to - s.base) as u32 % 64 } else { 63 };
            let mask = range_mask(first, last);
            removed += (self.region[w] & mask).count_ones();
            self.region[w] &= !mask;
        }
        if let Action::Assign(v) = action {
            let k = (v - s.base) as usize;
            self.region[bits + k / 64] |= 1 << (k % 64);
            removed -= 1;
        }
        let new_size = size - removed;
        debug_assert!(new_size >= 1 && new_lo <= new_hi);
        self.region[s.offset as usize] =
            (new_lo - s.base) as u32 as u64 | ((new_hi - s.base) as u32 as u64) << 32;
        self.region[s.offset as usize + 1] = new_size as u64;

        let class = if new_size == 1 {
            EventClass::Instantiated
        } else if new_lo != lo || new_hi != hi {
            EventClass::BoundsChanged
        } else {
            EventClass::DomainChanged
        };
        Narrowing::Narrowed(DomainEvent { var, class })
    }

    #[inline]
    fn bit(&self, s: IntSlot, v: Value) -> bool {
        let k = (v - s.base) as usize;
        self.region[s.offset as usize + 2 + k / 64] >> (k % 64) & 1 == 1
    }

    /// Smallest member `>= from`; the caller guarantees one exists.
    fn next_member(&self, s: IntSlot, from: Value) -> Value {
        let bits = &self.region[s.offset as usize + 2..][..s.words as usize];
        let k = (from - s.base) as usize;
        let (mut w, b) = (k / 64, k % 64);
        let mut word = bits[w] & (u64::MAX << b);
        while word == 0 {
            w += 1;
            word = bits[w];
        }
        s.base + (w * 64 + word.trailing_zeros() as usize) as Value
    }

    /// Largest member `<= from`; the caller guarantees one exists.
    fn prev_member(&self, s: IntSlot, from: Value) -> Value {
        let bits = &self.region[s.offset as usize + 2..][..s.words as usize];
        let k = (from - s.base) as usize;
        let (mut w, b) = (k / 64, k % 64);
        let mut word = bits[w] & (u64::MAX >> (63 - b));
        while word == 0 {
            w -= 1;
            word = bits[w];
        }
        s.base + (w * 64 + 63 - word.leading_zeros() as usize) as Value
    }
}

#[inline]
fn range_mask(first: u32, last: u32) -> u64 {
    (u64::MAX << first) & (u64::MAX >> (63 - last))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn store_with(lo: Value, hi: Value) -> (VariableStore, VarId) {
        let mut s = VariableStore::new();
        let x = s.new_int_var(lo, hi).unwrap();
        (s, x)
    }

    #[test]
    fn new_int_var_examples() {
        let (s, x) = store_with(0, 19);
        assert_eq!((s.size(x), s.min(x), s.max(x)), (20, 0, 19));
        let (s, x) = store_with(5, 5);
        assert_eq!(s.value(x), Some(5));
        let (s, x) = store_with(-19, 19);
        assert_eq!(s.size(x), 39);
        assert_eq!(s.int_domain(x).values().count(), 39);
    }

    #[test]
    fn new_int_var_rejects_empty() {
        let mut s = VariableStore::new();
        assert_eq!(s.new_int_var(3, 2), Err(DomainError::EmptyDomain { lo: 3, hi: 2 }));
    }

    #[test]
    fn bool_vars() {
        let mut s = VariableStore::new();
        let a = s.new_bool_var();
        let b = s.new_bool_var();
        assert_ne!(a, b);
        assert_eq!(s.bool_state(a), BoolState::Unknown);
        for _ in 2..16400 {
            s.new_bool_var();
        }
        assert_eq!(s.num_bool_vars(), 16400);
        assert_eq!(s.num_vars(), 16400);
    }

    #[test]
    fn narrow_examples() {
        let (mut s, x) = store_with(0, 3);
        let r = s.narrow(x, Action::RemoveValue(2), &mut NoRecord);
        assert_eq!(
            r,
            Narrowing::Narrowed(DomainEvent { var: x, class: EventClass::DomainChanged })
        );
        assert_eq!(s.values(x), vec![0, 1, 3]);
        assert_eq!(s.narrow(x, Action::TightenMin(0), &mut NoRecord), Narrowing::NoChange);

        let (mut s, y) = store_with(5, 5);
        assert_eq!(s.narrow(y, Action::RemoveValue(5), &mut NoRecord), Narrowing::Failed);
        assert_eq!(s.value(y), Some(5));
    }

    #[test]
    fn event_strength() {
        let (mut s, x) = store_with(0, 3);
        let ev = |n: Narrowing| match n {
            Narrowing::Narrowed(e) => e.class,
            other => panic!("{other:?}"),
        };
        assert_eq!(ev(s.narrow(x, Action::RemoveValue(0), &mut NoRecord)), EventClass::BoundsChanged);
        assert_eq!(ev(s.narrow(x, Action::RemoveValue(1), &mut NoRecord)), EventClass::BoundsChanged);
        assert_eq!(ev(s.narrow(x, Action::RemoveValue(3), &mut NoRecord)), EventClass::Instantiated);
        let (mut s, x) = store_with(0, 3);
        assert_eq!(ev(s.narrow(x, Action::Assign(2), &mut NoRecord)), EventClass::Instantiated);
        assert_eq!(s.values(x), vec![2]);
    }

    #[test]
    fn multi_word_domains() {
        let (mut s, x) = store_with(-100, 238);
        assert_eq!(s.size(x), 339);
        assert!(s.narrow(x, Action::TightenMin(70), &mut NoRecord).is_narrowed());
        assert_eq!(s.min(x), 70);
        assert_eq!(s.size(x), 169);
        s.narrow(x, Action::RemoveValue(238), &mut NoRecord);
        s.narrow(x, Action::RemoveValue(237), &mut NoRecord);
        assert_eq!(s.max(x), 236);
        s.narrow(x, Action::TightenMax(100), &mut NoRecord);
        assert_eq!((s.min(x), s.max(x), s.size(x)), (70, 100, 31));
        s.narrow(x, Action::Assign(99), &mut NoRecord);
        assert_eq!(s.values(x), vec![99]);
        // Canonical layout: nothing outside the single member survives.
        let pop: u32 = s.int_domain(x).bits.iter().map(|w| w.count_ones()).sum();
        assert_eq!(pop, 1);
    }

    #[test]
    fn tighten_skips_holes() {
        let (mut s, x) = store_with(0, 9);
        for v in [3, 4, 5] {
            s.narrow(x, Action::RemoveValue(v), &mut NoRecord);
        }
        s.narrow(x, Action::TightenMin(3), &mut NoRecord);
        assert_eq!(s.min(x), 6);
        s.narrow(x, Action::TightenMax(8), &mut NoRecord);
        assert_eq!(s.values(x), vec![6, 7, 8]);
    }

    #[test]
    fn bool_narrowing() {
        let mut s = VariableStore::new();
        let b = s.new_bool_var();
        assert_eq!(s.narrow(b, Action::RemoveValue(7), &mut NoRecord), Narrowing::NoChange);
        assert!(s.narrow(b, Action::TightenMin(1), &mut NoRecord).is_narrowed());
        assert_eq!(s.bool_state(b), BoolState::True);
        assert_eq!(s.narrow(b, Action::Assign(0), &mut NoRecord), Narrowing::Failed);
        assert_eq!(s.bool_state(b), BoolState::True);
    }

    #[test]
    fn var_lookup_by_index() {
        let mut s = VariableStore::new();
        let a = s.new_int_var(0, 1).unwrap();
        let b = s.new_bool_var();
        let c = s.new_int_var(0, 4).unwrap();
        let d = s.new_bool_var();
        assert_eq!([s.var(0), s.var(1), s.var(2), s.var(3)], [a, b, c, d]);
    }
}
