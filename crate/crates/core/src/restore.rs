//! Backtrack memory.
//!
//! Three interchangeable strategies restore the store when search retreats:
//!
//! * [`RestoreMode::Trail`] logs the old words of every mutation and writes
//!   them back in reverse.
//! * [`RestoreMode::Copy`] snapshots the whole domain region at every node.
//! * [`RestoreMode::CopyRecompute`] snapshots only every `distance` levels and
//!   rebuilds the states in between by replaying the recorded decisions with
//!   full propagation. When a replay is at least `adaptive_distance` decisions
//!   long, one extra snapshot is dropped at the midpoint of the replayed path
//!   so that later retreats into the same region replay less.

use std::fmt;

use smallvec::SmallVec;
use thiserror::Error;

use crate::domain::{Action, Recorder, Value, VarId, VariableStore};
use crate::propagate::Space;

/// A binary branching decision: the left branch assigns, the right excludes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decision {
    Assign(VarId, Value),
    Exclude(VarId, Value),
}

impl Decision {
    pub fn var(self) -> VarId {
        match self {
            Decision::Assign(x, _) | Decision::Exclude(x, _) => x,
        }
    }

    pub fn action(self) -> Action {
        match self {
            Decision::Assign(_, v) => Action::Assign(v),
            Decision::Exclude(_, v) => Action::RemoveValue(v),
        }
    }

    pub fn is_left(self) -> bool {
        matches!(self, Decision::Assign(..))
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decision::Assign(x, v) => write!(f, "{x} = {v}"),
            Decision::Exclude(x, v) => write!(f, "{x} != {v}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum RestoreMode {
    #[default]
    Trail,
    Copy,
    CopyRecompute { distance: u32, adaptive_distance: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RestoreModeError {
    #[error("recomputation distance must be positive")]
    ZeroDistance,
    #[error("adaptive recomputation distance must be positive")]
    ZeroAdaptiveDistance,
}

impl RestoreMode {
    pub fn copy_recompute(distance: u32, adaptive_distance: u32) -> Result<Self, RestoreModeError> {
        if distance == 0 {
            return Err(RestoreModeError::ZeroDistance);
        }
        if adaptive_distance == 0 {
            return Err(RestoreModeError::ZeroAdaptiveDistance);
        }
        Ok(RestoreMode::CopyRecompute { distance, adaptive_distance })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RestoreMode::Trail => "trail",
            RestoreMode::Copy => "copy",
            RestoreMode::CopyRecompute { .. } => "copy-recompute",
        }
    }
}

/// Undo record for one mutation: `(region index, old word)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrailEntry {
    pub var: VarId,
    pub words: SmallVec<[(u32, u64); 4]>,
}

impl TrailEntry {
    pub fn single(var: VarId, index: u32, old: u64) -> Self {
        let mut words = SmallVec::new();
        words.push((index, old));
        Self { var, words }
    }
}

/// An image of the store's domain region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    pub depth: u32,
    pub blob: Vec<u64>,
}

impl Snapshot {
    pub fn bytes(&self) -> usize {
        self.blob.len() * std::mem::size_of::<u64>()
    }
}

/// One open search node. The frame at `depth` restores the state at
/// `depth - 1`, i.e. the state its decision was applied to.
#[derive(Debug, Clone)]
pub struct NodeFrame {
    pub depth: u32,
    pub decision: Decision,
    pub trail_mark: usize,
    pub snapshot: Option<Snapshot>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RestoreStats {
    pub bytes_copied: u64,
    pub trail_entries: u64,
    pub snapshots_taken: u64,
    pub recomputations: u64,
    pub replayed_decisions: u64,
}

/// The frame stack plus whichever memory the configured mode needs.
#[derive(Debug)]
pub struct Restorer {
    mode: RestoreMode,
    frames: Vec<NodeFrame>,
    trail: Vec<TrailEntry>,
    stats: RestoreStats,
    spare: Vec<Vec<u64>>,
}

impl Recorder for Restorer {
    #[inline]
    fn is_recording(&self) -> bool {
        self.mode == RestoreMode::Trail
    }

    fn record(&mut self, entry: TrailEntry) {
        if self.mode == RestoreMode::Trail {
            self.trail.push(entry);
            self.stats.trail_entries += 1;
        }
    }
}

impl Restorer {
    pub fn new(mode: RestoreMode) -> Self {
        Self { mode, frames: Vec::new(), trail: Vec::new(), stats: RestoreStats::default(), spare: Vec::new() }
    }

    pub fn mode(&self) -> RestoreMode {
        self.mode
    }

    pub fn stats(&self) -> RestoreStats {
        self.stats
    }

    pub fn frames(&self) -> &[NodeFrame] {
        &self.frames
    }

    pub fn top(&self) -> Option<&NodeFrame> {
        self.frames.last()
    }

    /// Number of trail entries currently held.
    pub fn trail_len(&self) -> usize {
        self.trail.len()
    }

    fn snapshot(&mut self, store: &VariableStore) -> Snapshot {
        let mut blob = self.spare.pop().unwrap_or_default();
        store.capture_into(&mut blob);
        self.stats.snapshots_taken += 1;
        self.stats.bytes_copied += store.region_bytes() as u64;
        Snapshot { depth: store.depth(), blob }
    }

    fn recycle(&mut self, frame: NodeFrame) {
        if let Some(s) = frame.snapshot {
            self.spare.push(s.blob);
        }
    }

    fn truncate(&mut self, len: usize) {
        while self.frames.len() > len {
            let f = self.frames.pop().expect("non-empty");
            self.recycle(f);
        }
    }

    /// Opens a child of the current node. Must be called before `decision`
    /// is applied to the store.
    pub fn open_node(&mut self, store: &mut VariableStore, decision: Decision) -> &NodeFrame {
        let depth = store.depth();
        debug_assert_eq!(depth as usize, self.frames.len());
        let snapshot = match self.mode {
            RestoreMode::Trail => None,
            RestoreMode::Copy => Some(self.snapshot(store)),
            RestoreMode::CopyRecompute { distance, .. } => {
                depth.is_multiple_of(distance).then(|| self.snapshot(store))
            }
        };
        self.frames.push(NodeFrame {
            depth: depth + 1,
            decision,
            trail_mark: self.trail.len(),
            snapshot,
        });
        store.set_depth(depth + 1);
        self.frames.last().expect("just pushed")
    }

    /// Restores the state the space had at `target` depth and closes every
    /// deeper frame.
    ///
    /// Panics if recomputation fails to replay a path that succeeded before,
    /// which would mean some propagator is not monotone.
    pub fn backtrack_to(&mut self, space: &mut Space, target: u32) {
        let t = target as usize;
        assert!(t < self.frames.len(), "backtrack target {target} is not above the current depth");
        space.engine.unsubsume_above(target);
        match self.mode {
            RestoreMode::Trail => {
                let mark = self.frames[t].trail_mark;
                while self.trail.len() > mark {
                    let e = self.trail.pop().expect("non-empty");
                    space.store.undo(&e);
                }
                self.truncate(t);
            }
            RestoreMode::Copy => {
                let snap = self.frames[t].snapshot.as_ref().expect("copy frames hold snapshots");
                space.store.load(&snap.blob);
                self.truncate(t);
            }
            RestoreMode::CopyRecompute { adaptive_distance, .. } => {
                self.truncate(t + 1);
                let from = (0..=t)
                    .rev()
                    .find(|&k| self.frames[k].snapshot.is_some())
                    .expect("the first frame always holds a snapshot");
                let snap = self.frames[from].snapshot.as_ref().expect("checked");
                space.store.load(&snap.blob);
                self.truncate(t);
                space.store.set_depth(from as u32);
                self.replay(space, from, t, adaptive_distance);
            }
        }
        space.store.set_depth(target);
    }

    fn replay(&mut self, space: &mut Space, from: usize, to: usize, adaptive_distance: u32) {
        let len = to - from;
        if len == 0 {
            return;
        }
        space.engine.unsubsume_above(from as u32);
        self.stats.recomputations += 1;
        self.stats.replayed_decisions += len as u64;
        let mid = (len >= adaptive_distance as usize && len >= 2).then_some(from + len / 2);
        space.engine.set_dynamic_enabled(false);
        for j in from..to {
            if Some(j) == mid && self.frames[j].snapshot.is_none() {
                let snap = self.snapshot(&space.store);
                self.frames[j].snapshot = Some(snap);
            }
            let decision = self.frames[j].decision;
            space.store.set_depth(j as u32 + 1);
            let replayed = space.apply(decision, self);
            assert!(replayed.is_ok(), "replaying {decision} at depth {} failed", j + 1);
        }
        space.engine.set_dynamic_enabled(true);
    }
}
