use std::collections::BTreeSet;

use fdlab::domain::Value;
use fdlab::models::{build, check_solution, Instance, Problem};
use fdlab::propagate::QueuePolicy;
use fdlab::{
    minimize, solve, BnBMode, Model, RestoreMode, SearchConfig, SearchError, SolveMode,
};

fn inst(s: &str) -> Instance {
    s.parse().unwrap()
}

fn all_solutions(s: &str) -> BTreeSet<Vec<Value>> {
    let i = inst(s);
    let out = solve(build(&i).unwrap(), SolveMode::All, &SearchConfig::default());
    assert!(out.complete);
    assert_eq!(out.stats.solutions as usize, out.solutions.len());
    for sol in &out.solutions {
        assert!(check_solution(&i.problem, &sol.values).unwrap().is_valid());
    }
    out.solutions.into_iter().map(|s| s.values).collect()
}

/// Every queen placement with one queen per row, filtered by attacks.
fn queens_oracle(n: usize) -> BTreeSet<Vec<Value>> {
    let total = n.pow(n as u32);
    (0..total)
        .map(|mut code| {
            (0..n)
                .map(|_| {
                    let v = (code % n) as Value;
                    code /= n;
                    v
                })
                .collect::<Vec<_>>()
        })
        .filter(|cols| {
            (0..n).all(|i| {
                (i + 1..n).all(|j| {
                    cols[i] != cols[j] && (cols[i] - cols[j]).unsigned_abs() as usize != j - i
                })
            })
        })
        .collect()
}

/// Heap's algorithm over all arrangements of 1..=9, keeping magic squares in
/// the orientation the corner orderings select.
fn magic3_oracle() -> BTreeSet<Vec<Value>> {
    fn lines_ok(g: &[Value]) -> bool {
        let l = [
            [0, 1, 2], [3, 4, 5], [6, 7, 8], [0, 3, 6], [1, 4, 7], [2, 5, 8], [0, 4, 8], [2, 4, 6],
        ];
        l.iter().all(|t| t.iter().map(|&i| g[i]).sum::<Value>() == 15)
    }
    let mut a: Vec<Value> = (1..=9).collect();
    let mut c = [0usize; 9];
    let mut out = BTreeSet::new();
    let mut visit = |g: &[Value]| {
        let (tl, tr, bl, br) = (g[0], g[2], g[6], g[8]);
        if lines_ok(g) && tl <= tr && tl <= bl && tl <= br && tr <= bl {
            out.insert(g.to_vec());
        }
    };
    visit(&a);
    let mut i = 0;
    while i < 9 {
        if c[i] < i {
            if i % 2 == 0 { a.swap(0, i) } else { a.swap(c[i], i) }
            visit(&a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Shortest Golomb ruler with `m` marks, by direct depth-first construction.
fn golomb_oracle(m: usize) -> Value {
    fn extend(marks: &mut Vec<Value>, used: &mut Vec<bool>, m: usize, len: Value) -> bool {
        if marks.len() == m {
            return true;
        }
        let last = *marks.last().unwrap();
        for next in last + 1..=len {
            let ds: Vec<usize> = marks.iter().map(|&p| (next - p) as usize).collect();
            if ds.iter().any(|&d| used[d]) || ds.iter().collect::<BTreeSet<_>>().len() != ds.len() {
                continue;
            }
            ds.iter().for_each(|&d| used[d] = true);
            marks.push(next);
            if extend(marks, used, m, len) {
                return true;
            }
            marks.pop();
            ds.iter().for_each(|&d| used[d] = false);
        }
        false
    }
    (0..).find(|&len| extend(&mut vec![0], &mut vec![false; len as usize + 1], m, len)).unwrap()
}

#[test]
fn queens_solution_sets() {
    assert_eq!(all_solutions("queens:4"), queens_oracle(4));
    assert_eq!(all_solutions("queens:4").len(), 2);
    assert_eq!(all_solutions("queens:6"), queens_oracle(6));
    assert_eq!(all_solutions("queens:6").len(), 4);
}

#[test]
fn magic3_has_one_canonical_square() {
    let oracle = magic3_oracle();
    assert_eq!(oracle.len(), 1);
    assert_eq!(all_solutions("magic:3"), oracle);
}

#[test]
fn first_mode_stops_at_one() {
    let out = solve(build(&inst("queens:4")).unwrap(), SolveMode::First, &SearchConfig::default());
    assert_eq!(out.stats.solutions, 1);
    assert_eq!(out.solutions.len(), 1);
    assert!(out.complete);
}

#[test]
fn root_failure_means_no_search() {
    let mut m = Model::new();
    let x = m.new_int_var(0, 3).unwrap();
    let y = m.new_int_var(0, 3).unwrap();
    m.post_le(x, y, true).unwrap();
    m.post_le(y, x, true).unwrap();
    m.set_branch_order(vec![x, y]);
    m.set_objective(x);
    let out = solve(m, SolveMode::All, &SearchConfig::default());
    assert!(out.solutions.is_empty());
    assert_eq!((out.stats.nodes, out.stats.backtracks), (0, 0));

    let mut m = Model::new();
    let x = m.new_int_var(0, 3).unwrap();
    m.post_eq_const(x, 1).unwrap();
    m.post_ne_const(x, 1).unwrap();
    m.set_objective(x);
    match minimize(m, &SearchConfig::default()) {
        Err(SearchError::Infeasible(stats)) => assert_eq!(stats.nodes, 0),
        other => panic!("expected infeasible, got {other:?}"),
    }
    assert_eq!(
        minimize(Model::new(), &SearchConfig::default()),
        Err(SearchError::NoObjective)
    );
}

#[test]
fn nodes_per_second_is_nodes_over_solve_time() {
    let out = solve(build(&inst("queens:8")).unwrap(), SolveMode::All, &SearchConfig::default());
    let s = out.stats;
    let expected = s.nodes as f64 / s.solve.as_secs_f64().max(1e-9);
    assert!((s.nps() - expected).abs() <= 1e-9 * expected.max(1.0));
    assert!(s.backtracks <= s.nodes);
    assert_eq!(out.solutions.len(), 92);
}

#[test]
fn node_limit_marks_result_incomplete() {
    let cfg = SearchConfig::default().with_node_limit(5);
    let out = solve(build(&inst("queens:8")).unwrap(), SolveMode::All, &cfg);
    assert!(!out.complete);
    assert!(out.stats.nodes <= 5);
}

#[test]
fn golomb_optima_match_direct_construction() {
    for (m, expected) in [(5, 11), (6, 17), (7, 25)] {
        assert_eq!(golomb_oracle(m), expected);
        let p = Problem::Golomb { m: m as u32 };
        let mut trajectories = Vec::new();
        for bnb in [BnBMode::PostConstraint, BnBMode::TightenBound] {
            for restore in [RestoreMode::Trail, RestoreMode::Copy, RestoreMode::copy_recompute(4, 2).unwrap()] {
                let cfg = SearchConfig::new(restore, QueuePolicy::Priority).with_bnb(bnb);
                let o = minimize(build(&Instance::new(p)).unwrap(), &cfg).unwrap();
                assert!(o.complete);
                assert_eq!(o.value, expected);
                assert_eq!(*o.best.values.last().unwrap(), expected);
                assert!(check_solution(&p, &o.best.values).unwrap().is_valid());
                trajectories.push(o.stats.trajectory());
            }
        }
        assert!(trajectories.windows(2).all(|w| w[0] == w[1]), "{trajectories:?}");
    }
}
