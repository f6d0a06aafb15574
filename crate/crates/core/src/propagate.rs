//! Event-driven propagation.
//!
//! Propagators subscribe to `(variable, event class)` pairs. A narrowing wakes
//! every subscriber whose class is no stronger than the event, and the queue
//! hands them out according to its [`QueuePolicy`] until nothing is pending.

use std::collections::VecDeque;
use std::fmt;

use crate::domain::{
    Action, DomainEvent, EventClass, Narrowing, Recorder, Value, VarId, VariableStore,
};
use crate::restore::Decision;

/// Number of distinct priority levels. Lower runs first under
/// [`QueuePolicy::Priority`].
pub const PRIORITY_LEVELS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PropId(pub u32);

impl PropId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Raised when a domain would become empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Conflict;

/// Raised when propagation fails at a search node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Failure;

/// What a propagator reports when it returns normally.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    AtFixpoint,
    Reschedule,
    Subsumed,
}

pub type PropResult = Result<Status, Conflict>;

/// The engine-level result of one propagator run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropOutcome {
    AtFixpoint,
    Reschedule,
    Failed,
    Subsumed,
}

impl From<PropResult> for PropOutcome {
    fn from(r: PropResult) -> Self {
        match r {
            Ok(Status::AtFixpoint) => PropOutcome::AtFixpoint,
            Ok(Status::Reschedule) => PropOutcome::Reschedule,
            Ok(Status::Subsumed) => PropOutcome::Subsumed,
            Err(Conflict) => PropOutcome::Failed,
        }
    }
}

/// A monotone, contracting filtering function for one constraint.
///
/// Propagators hold no search state of their own: everything they read or
/// write goes through the [`PropCtx`], so restoring the store restores them.
pub trait Propagator: fmt::Debug + Send {
    fn name(&self) -> &'static str;

    fn subscriptions(&self) -> Vec<(VarId, EventClass)>;

    /// Narrow domains until this propagator is at its own fixpoint (or ask to
    /// be rescheduled).
    fn propagate(&self, ctx: &mut PropCtx<'_>) -> PropResult;
}

/// Access to the store for the duration of one propagator run.
pub struct PropCtx<'a> {
    store: &'a mut VariableStore,
    rec: &'a mut dyn Recorder,
    events: &'a mut Vec<DomainEvent>,
}

impl<'a> PropCtx<'a> {
    pub fn new(
        store: &'a mut VariableStore,
        rec: &'a mut dyn Recorder,
        events: &'a mut Vec<DomainEvent>,
    ) -> Self {
        Self { store, rec, events }
    }

    pub fn store(&self) -> &VariableStore {
        self.store
    }

    #[inline]
    pub fn min(&self, x: VarId) -> Value {
        self.store.min(x)
    }
    #[inline]
    pub fn max(&self, x: VarId) -> Value {
        self.store.max(x)
    }
    #[inline]
    pub fn is_fixed(&self, x: VarId) -> bool {
        self.store.is_fixed(x)
    }
    #[inline]
    pub fn value(&self, x: VarId) -> Option<Value> {
        self.store.value(x)
    }
    pub fn contains(&self, x: VarId, v: Value) -> bool {
        self.store.contains(x, v)
    }

    /// Applies `action`; `Ok(true)` if the domain shrank.
    #[inline]
    pub fn narrow(&mut self, x: VarId, action: Action) -> Result<bool, Conflict> {
        match self.store.narrow(x, action, self.rec) {
            Narrowing::Narrowed(ev) => {
                self.events.push(ev);
                Ok(true)
            }
            Narrowing::NoChange => Ok(false),
            Narrowing::Failed => Err(Conflict),
        }
    }
    pub fn remove(&mut self, x: VarId, v: Value) -> Result<bool, Conflict> {
        self.narrow(x, Action::RemoveValue(v))
    }
    pub fn set_min(&mut self, x: VarId, v: Value) -> Result<bool, Conflict> {
        self.narrow(x, Action::TightenMin(v))
    }
    pub fn set_max(&mut self, x: VarId, v: Value) -> Result<bool, Conflict> {
        self.narrow(x, Action::TightenMax(v))
    }
    pub fn assign(&mut self, x: VarId, v: Value) -> Result<bool, Conflict> {
        self.narrow(x, Action::Assign(v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum QueuePolicy {
    /// Insertion order; priorities are ignored.
    Fifo,
    /// Lowest priority value first, FIFO within a level.
    #[default]
    Priority,
    /// Highest priority value first, FIFO within a level.
    ReversedPriority,
}

impl QueuePolicy {
    pub const ALL: [QueuePolicy; 3] =
        [QueuePolicy::Fifo, QueuePolicy::Priority, QueuePolicy::ReversedPriority];

    pub fn as_str(self) -> &'static str {
        match self {
            QueuePolicy::Fifo => "fifo",
            QueuePolicy::Priority => "priority",
            QueuePolicy::ReversedPriority => "reversed",
        }
    }
}

/// Pending propagators, each at most once.
#[derive(Debug, Clone)]
pub struct PropQueue {
    policy: QueuePolicy,
    buckets: Vec<VecDeque<PropId>>,
    queued: Vec<bool>,
    len: usize,
}

impl PropQueue {
    pub fn new(policy: QueuePolicy) -> Self {
        let levels = if policy == QueuePolicy::Fifo { 1 } else { PRIORITY_LEVELS };
        Self { policy, buckets: vec![VecDeque::new(); levels], queued: Vec::new(), len: 0 }
    }

    pub fn policy(&self) -> QueuePolicy {
        self.policy
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, p: PropId) -> bool {
        self.queued.get(p.index()).copied().unwrap_or(false)
    }

    /// Returns false if `p` was already pending.
    pub fn push(&mut self, p: PropId, priority: u8) -> bool {
        if p.index() >= self.queued.len() {
            self.queued.resize(p.index() + 1, false);
        }
        if self.queued[p.index()] {
            return false;
        }
        self.queued[p.index()] = true;
        let level = if self.policy == QueuePolicy::Fifo { 0 } else { priority as usize };
        self.buckets[level].push_back(p);
        self.len += 1;
        true
    }

    pub fn pop(&mut self) -> Option<PropId> {
        if self.len == 0 {
            return None;
        }
        let bucket = match self.policy {
            QueuePolicy::ReversedPriority => self.buckets.iter_mut().rev().find(|b| !b.is_empty()),
            _ => self.buckets.iter_mut().find(|b| !b.is_empty()),
        };
        let p = bucket.and_then(VecDeque::pop_front)?;
        self.queued[p.index()] = false;
        self.len -= 1;
        Some(p)
    }

    pub fn clear(&mut self) {
        for b in &mut self.buckets {
            for p in b.drain(..) {
                self.queued[p.index()] = false;
            }
        }
        self.len = 0;
    }
}

#[derive(Debug)]
struct PropSlot {
    prop: Box<dyn Propagator>,
    priority: u8,
    /// Posted during search (branch and bound); skipped while replaying.
    dynamic: bool,
}

#[derive(Debug, Clone, Copy)]
struct Watch {
    prop: PropId,
    class: EventClass,
}

/// Subscription lists, indexed by variable.
#[derive(Debug, Default, Clone)]
pub struct Subscriptions {
    lists: Vec<Vec<Watch>>,
}

impl Subscriptions {
    fn add(&mut self, var: VarId, prop: PropId, class: EventClass) {
        if var.index() >= self.lists.len() {
            self.lists.resize_with(var.index() + 1, Vec::new);
        }
        let list = &mut self.lists[var.index()];
        // Keep the weakest class if a propagator subscribes twice.
        if let Some(w) = list.iter_mut().find(|w| w.prop == prop) {
            w.class = w.class.min(class);
        } else {
            list.push(Watch { prop, class });
        }
    }

    /// Propagators woken by an event of class `class` on `var`.
    pub fn woken(&self, var: VarId, class: EventClass) -> impl Iterator<Item = PropId> + '_ {
        self.lists
            .get(var.index())
            .into_iter()
            .flatten()
            .filter(move |w| class >= w.class)
            .map(|w| w.prop)
    }
}

/// The propagator set plus the machinery to run it to a fixpoint.
#[derive(Debug)]
pub struct Engine {
    props: Vec<PropSlot>,
    subs: Subscriptions,
    queue: PropQueue,
    subsumed: Vec<bool>,
    /// Subsumptions in order, with the depth at which they happened.
    subsumed_log: Vec<(PropId, u32)>,
    events: Vec<DomainEvent>,
    dynamic_enabled: bool,
    propagations: u64,
}

impl Default for Engine {
    fn default() -> Self {
        Self::new(QueuePolicy::default())
    }
}

impl Engine {
    pub fn new(policy: QueuePolicy) -> Self {
        Self {
            props: Vec::new(),
            subs: Subscriptions::default(),
            queue: PropQueue::new(policy),
            subsumed: Vec::new(),
            subsumed_log: Vec::new(),
            events: Vec::new(),
            dynamic_enabled: true,
            propagations: 0,
        }
    }

    /// Swaps the queue for one with a different policy, keeping whatever is
    /// pending.
    pub fn set_policy(&mut self, policy: QueuePolicy) {
        let mut queue = PropQueue::new(policy);
        while let Some(p) = self.queue.pop() {
            queue.push(p, self.props[p.index()].priority);
        }
        self.queue = queue;
    }

    pub fn policy(&self) -> QueuePolicy {
        self.queue.policy()
    }

    pub fn add(&mut self, prop: Box<dyn Propagator>, priority: u8, dynamic: bool) -> PropId {
        assert!((priority as usize) < PRIORITY_LEVELS, "priority {priority} out of range");
        let id = PropId(self.props.len() as u32);
        for (var, class) in prop.subscriptions() {
            self.subs.add(var, id, class);
        }
        self.props.push(PropSlot { prop, priority, dynamic });
        self.subsumed.push(false);
        self.queue.push(id, priority);
        id
    }

    pub fn len(&self) -> usize {
        self.props.len()
    }

    pub fn is_empty(&self) -> bool {
        self.props.is_empty()
    }

    pub fn propagator(&self, p: PropId) -> &dyn Propagator {
        self.props[p.index()].prop.as_ref()
    }

    pub fn priority(&self, p: PropId) -> u8 {
        self.props[p.index()].priority
    }

    pub fn is_subsumed(&self, p: PropId) -> bool {
        self.subsumed[p.index()]
    }

    pub fn propagations(&self) -> u64 {
        self.propagations
    }

    pub fn pending(&self) -> usize {
        self.queue.len()
    }

    pub fn set_dynamic_enabled(&mut self, on: bool) {
        self.dynamic_enabled = on;
    }

    fn is_active(&self, p: PropId) -> bool {
        let slot = &self.props[p.index()];
        !self.subsumed[p.index()] && (self.dynamic_enabled || !slot.dynamic)
    }

    fn enqueue(&mut self, p: PropId) {
        if self.is_active(p) {
            let priority = self.props[p.index()].priority;
            self.queue.push(p, priority);
        }
    }

    /// Queues every subscriber woken by `event`, except `running`.
    pub fn schedule(&mut self, event: DomainEvent, running: Option<PropId>) {
        let Engine { subs, queue, props, subsumed, dynamic_enabled, .. } = self;
        for p in subs.woken(event.var, event.class) {
            if Some(p) == running || subsumed[p.index()] {
                continue;
            }
            let slot = &props[p.index()];
            if slot.dynamic && !*dynamic_enabled {
                continue;
            }
            queue.push(p, slot.priority);
        }
    }

    pub fn schedule_all(&mut self) {
        for i in 0..self.props.len() {
            self.enqueue(PropId(i as u32));
        }
    }

    pub fn schedule_dynamic(&mut self) {
        for i in 0..self.props.len() {
            if self.props[i].dynamic {
                self.enqueue(PropId(i as u32));
            }
        }
    }

    /// Forgets subsumptions that happened deeper than `depth`.
    pub fn unsubsume_above(&mut self, depth: u32) {
        while let Some(&(p, d)) = self.subsumed_log.last() {
            if d <= depth {
                break;
            }
            self.subsumed[p.index()] = false;
            self.subsumed_log.pop();
        }
    }

    /// Runs pending propagators until none is left.
    pub fn fixpoint(
        &mut self,
        store: &mut VariableStore,
        rec: &mut dyn Recorder,
    ) -> Result<(), Failure> {
        let mut events = std::mem::take(&mut self.events);
        let result = loop {
            let Some(p) = self.queue.pop() else { break Ok(()) };
            if !self.is_active(p) {
                continue;
            }
            self.propagations += 1;
            let outcome: PropOutcome = {
                let mut ctx = PropCtx::new(store, rec, &mut events);
                self.props[p.index()].prop.propagate(&mut ctx).into()
            };
            if outcome == PropOutcome::Failed {
                self.queue.clear();
                events.clear();
                break Err(Failure);
            }
            for ev in events.drain(..) {
                self.schedule(ev, Some(p));
            }
            match outcome {
                PropOutcome::Reschedule => self.enqueue(p),
                PropOutcome::Subsumed => {
                    self.subsumed[p.index()] = true;
                    self.subsumed_log.push((p, store.depth()));
                }
                _ => {}
            }
        };
        self.events = events;
        result
    }
}

/// A store together with the propagators that constrain it.
#[derive(Debug, Default)]
pub struct Space {
    pub store: VariableStore,
    pub engine: Engine,
}

impl Space {
    pub fn new(store: VariableStore, engine: Engine) -> Self {
        Self { store, engine }
    }

    /// Applies an action from outside any propagator and queues the
    /// subscribers it wakes.
    pub fn narrow(
        &mut self,
        var: VarId,
        action: Action,
        rec: &mut dyn Recorder,
    ) -> Result<(), Failure> {
        match self.store.narrow(var, action, rec) {
            Narrowing::Narrowed(ev) => {
                self.engine.schedule(ev, None);
                Ok(())
            }
            Narrowing::NoChange => Ok(()),
            Narrowing::Failed => {
                self.engine.queue.clear();
                Err(Failure)
            }
        }
    }

    pub fn propagate(&mut self, rec: &mut dyn Recorder) -> Result<(), Failure> {
        self.engine.fixpoint(&mut self.store, rec)
    }

    /// Applies a branching decision and propagates to fixpoint.
    pub fn apply(&mut self, decision: Decision, rec: &mut dyn Recorder) -> Result<(), Failure> {
        self.narrow(decision.var(), decision.action(), rec)?;
        self.propagate(rec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::NoRecord;

    /// x <= c as a tiny test propagator.
    #[derive(Debug)]
    struct AtMost(VarId, Value);
    impl Propagator for AtMost {
        fn name(&self) -> &'static str {
            "at_most"
        }
        fn subscriptions(&self) -> Vec<(VarId, EventClass)> {
            vec![(self.0, EventClass::BoundsChanged)]
        }
        fn propagate(&self, ctx: &mut PropCtx<'_>) -> PropResult {
            ctx.set_max(self.0, self.1)?;
            Ok(Status::Subsumed)
        }
    }

    #[derive(Debug)]
    struct AtLeast(VarId, Value);
    impl Propagator for AtLeast {
        fn name(&self) -> &'static str {
            "at_least"
        }
        fn subscriptions(&self) -> Vec<(VarId, EventClass)> {
            vec![(self.0, EventClass::BoundsChanged)]
        }
        fn propagate(&self, ctx: &mut PropCtx<'_>) -> PropResult {
            ctx.set_min(self.0, self.1)?;
            Ok(Status::Subsumed)
        }
    }

    /// x < y
    #[derive(Debug)]
    struct Less(VarId, VarId);
    impl Propagator for Less {
        fn name(&self) -> &'static str {
            "less"
        }
        fn subscriptions(&self) -> Vec<(VarId, EventClass)> {
            vec![(self.0, EventClass::BoundsChanged), (self.1, EventClass::BoundsChanged)]
        }
        fn propagate(&self, ctx: &mut PropCtx<'_>) -> PropResult {
            ctx.set_max(self.0, ctx.max(self.1) - 1)?;
            ctx.set_min(self.1, ctx.min(self.0) + 1)?;
            Ok(Status::AtFixpoint)
        }
    }

    #[test]
    fn queue_policies() {
        let mut q = PropQueue::new(QueuePolicy::Priority);
        q.push(PropId(0), 6);
        q.push(PropId(1), 2);
        q.push(PropId(2), 2);
        assert!(!q.push(PropId(1), 2));
        assert_eq!(q.len(), 3);
        let order: Vec<_> = std::iter::from_fn(|| q.pop()).collect();
        assert_eq!(order, vec![PropId(1), PropId(2), PropId(0)]);

        let mut q = PropQueue::new(QueuePolicy::ReversedPriority);
        q.push(PropId(0), 2);
        q.push(PropId(1), 6);
        q.push(PropId(2), 4);
        let order: Vec<_> = std::iter::from_fn(|| q.pop()).collect();
        assert_eq!(order, vec![PropId(1), PropId(2), PropId(0)]);

        let mut q = PropQueue::new(QueuePolicy::Fifo);
        q.push(PropId(0), 6);
        q.push(PropId(1), 2);
        let order: Vec<_> = std::iter::from_fn(|| q.pop()).collect();
        assert_eq!(order, vec![PropId(0), PropId(1)]);
    }

    #[test]
    fn schedule_examples() {
        let mut store = VariableStore::new();
        let x = store.new_int_var(0, 9).unwrap();
        let y = store.new_int_var(0, 9).unwrap();
        let mut engine = Engine::new(QueuePolicy::Fifo);
        engine.add(Box::new(AtMost(x, 5)), 2, false);
        engine.add(Box::new(Less(x, y)), 2, false);
        engine.queue.clear();

        let ev = DomainEvent { var: x, class: EventClass::BoundsChanged };
        engine.schedule(ev, None);
        assert_eq!(engine.pending(), 2);
        engine.schedule(ev, None);
        assert_eq!(engine.pending(), 2);
        engine.queue.clear();

        // A DomainChanged event does not wake bounds subscribers.
        engine.schedule(DomainEvent { var: x, class: EventClass::DomainChanged }, None);
        assert_eq!(engine.pending(), 0);
        engine.schedule(DomainEvent { var: x, class: EventClass::Instantiated }, None);
        assert_eq!(engine.pending(), 2);
        engine.queue.clear();
        engine.schedule(ev, Some(PropId(1)));
        assert_eq!(engine.pending(), 1);
    }

    #[test]
    fn instantiated_wakes_all_classes() {
        let mut subs = Subscriptions::default();
        let mut store = VariableStore::new();
        let x = store.new_int_var(0, 3).unwrap();
        subs.add(x, PropId(0), EventClass::DomainChanged);
        subs.add(x, PropId(1), EventClass::BoundsChanged);
        subs.add(x, PropId(2), EventClass::Instantiated);
        assert_eq!(subs.woken(x, EventClass::Instantiated).count(), 3);
        assert_eq!(subs.woken(x, EventClass::BoundsChanged).count(), 2);
        assert_eq!(subs.woken(x, EventClass::DomainChanged).count(), 1);
    }

    #[test]
    fn unsatisfiable_cycle_fails() {
        let mut store = VariableStore::new();
        let x = store.new_int_var(0, 2).unwrap();
        let y = store.new_int_var(0, 2).unwrap();
        let mut space = Space::new(store, Engine::new(QueuePolicy::Priority));
        space.engine.add(Box::new(Less(x, y)), 2, false);
        space.engine.add(Box::new(Less(y, x)), 2, false);
        assert_eq!(space.propagate(&mut NoRecord), Err(Failure));
        assert_eq!(space.engine.pending(), 0);
    }

    #[test]
    fn two_bounds_confluent() {
        for policy in QueuePolicy::ALL {
            let mut store = VariableStore::new();
            let x = store.new_int_var(0, 9).unwrap();
            let mut space = Space::new(store, Engine::new(policy));
            space.engine.add(Box::new(AtMost(x, 5)), 2, false);
            space.engine.add(Box::new(AtLeast(x, 3)), 6, false);
            space.propagate(&mut NoRecord).unwrap();
            assert_eq!(space.store.values(x), vec![3, 4, 5], "{policy:?}");
            assert!(space.engine.is_subsumed(PropId(0)));
        }
    }

    #[test]
    fn subsumption_is_undone_by_depth() {
        let mut store = VariableStore::new();
        let x = store.new_int_var(0, 9).unwrap();
        let mut space = Space::new(store, Engine::default());
        let p = space.engine.add(Box::new(AtMost(x, 5)), 2, false);
        space.store.set_depth(3);
        space.propagate(&mut NoRecord).unwrap();
        assert!(space.engine.is_subsumed(p));
        space.engine.unsubsume_above(3);
        assert!(space.engine.is_subsumed(p));
        space.engine.unsubsume_above(2);
        assert!(!space.engine.is_subsumed(p));
    }
}
