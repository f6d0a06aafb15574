//! Node-by-node fixpoints do not depend on queue policy or sum encoding.

use std::collections::hash_map::DefaultHasher;
use std::hash::Hasher;

use fdlab::models::{build, Instance};
use fdlab::propagate::{QueuePolicy, Space};
use fdlab::search::{minimize_observed, solve_observed, SearchEvent, SearchObserver};
use fdlab::{BoolMode, RestoreMode, SearchConfig, SolveMode, SumMode};

/// Folds every post-fixpoint store image, in visiting order, into one hash.
#[derive(Default)]
struct NodeDigest {
    hasher: DefaultHasher,
    nodes: u64,
}

impl SearchObserver for NodeDigest {
    fn notify(&mut self, event: SearchEvent, space: &Space) {
        if let SearchEvent::Root | SearchEvent::Node { .. } = event {
            self.nodes += 1;
            for &w in space.store.region() {
                self.hasher.write_u64(w);
            }
        }
    }
}

fn digest(inst: &Instance, queue: QueuePolicy, restore: RestoreMode) -> (u64, u64, (u64, u64, u64)) {
    let model = build(inst).unwrap();
    let mut obs = NodeDigest::default();
    let cfg = SearchConfig::new(restore, queue);
    let stats = if inst.problem.is_optimisation() {
        minimize_observed(model, &cfg, &mut obs).unwrap().stats
    } else {
        let mode = if matches!(inst.problem.class_name(), "queens" | "bibd") {
            SolveMode::All
        } else {
            SolveMode::First
        };
        solve_observed(model, mode, &cfg, &mut obs).stats
    };
    (obs.hasher.finish(), obs.nodes, stats.trajectory())
}

#[test]
fn fixpoints_are_bit_identical_across_policies_and_sum_modes() {
    for s in ["queens:6", "queens:8", "golomb:6", "magic:4", "golfers:2,3,3", "golfers:2,4,4", "bibd:7,3,2"] {
        let base: Instance = s.parse().unwrap();
        let bool_modes: &[BoolMode] = if base.problem.is_boolean() {
            &[BoolMode::NativeBool, BoolMode::IntZeroOne]
        } else {
            &[BoolMode::NativeBool]
        };
        for &bm in bool_modes {
            let mut seen = Vec::new();
            for sum in [SumMode::NativeEquals, SumMode::Decomposed] {
                for queue in QueuePolicy::ALL {
                    for restore in [RestoreMode::Trail, RestoreMode::copy_recompute(4, 2).unwrap()] {
                        let inst = base.with_bool_mode(bm).with_sum_mode(sum);
                        seen.push(((sum, queue, restore), digest(&inst, queue, restore)));
                    }
                }
            }
            let first = &seen[0].1;
            for (cfg, d) in &seen {
                assert_eq!(d, first, "{s} {bm:?} {cfg:?}");
            }
        }
    }
}
