use std::time::Duration;

use fdlab::models::Instance;
use fdlab::{BoolMode, RestoreMode, SearchStats, SolveMode};
use fdlab_bench::emit::{read_rows, write_rows, Row, COLUMNS};
use fdlab_bench::stats::{cov, median};
use fdlab_bench::{emit, ratio_report, run_config, run_matrix, Format, Outcome, RunConfig, RunRecord};
use proptest::prelude::*;

fn config(s: &str) -> RunConfig {
    RunConfig::new(s.parse::<Instance>().unwrap()).with_runs(1)
}

/// A record with fixed timings, for report and output tests.
fn fake(instance: &str, restore: RestoreMode, solve_ms: f64, backtracks: u64) -> RunRecord {
    let stats = SearchStats {
        nodes: 2 * backtracks + 1,
        backtracks,
        solutions: 1,
        solve: Duration::from_secs_f64(solve_ms / 1e3),
        ..SearchStats::default()
    };
    RunRecord {
        config: config(instance).with_restore(restore),
        outcome: Outcome::Solved { objective: None },
        runs: vec![stats],
        setup_ms_median: 0.0,
        solve_ms_median: solve_ms,
        cov: 0.0,
    }
}

#[test]
fn one_record_gives_header_and_one_row() {
    let rec = run_config(&config("queens:6")).unwrap();
    let mut buf = Vec::new();
    write_rows(&[Row::from(&rec)], Format::Csv, &mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], COLUMNS.join(","));
    let back = read_rows(Format::Csv, buf.as_slice()).unwrap();
    assert_eq!(back, vec![Row::from(&rec)]);
}

#[test]
fn json_round_trip_keeps_absent_fields() {
    let recs = [
        run_config(&config("golomb:5")).unwrap(),
        run_config(&config("bibd:7,3,2").with_restore(RestoreMode::copy_recompute(4, 2).unwrap()))
            .unwrap(),
    ];
    let rows: Vec<Row> = recs.iter().map(Row::from).collect();
    assert_eq!(rows[0].bool_mode, None);
    assert_eq!(rows[0].bnb.as_deref(), Some("post"));
    assert_eq!(rows[1].bnb, None);
    assert_eq!((rows[1].rec_dist, rows[1].adapt_dist), (Some(4), Some(2)));
    let mut buf = Vec::new();
    write_rows(&rows, Format::Json, &mut buf).unwrap();
    assert_eq!(read_rows(Format::Json, buf.as_slice()).unwrap(), rows);
}

#[test]
fn emit_writes_to_file_and_rejects_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let rec = fake("queens:8", RestoreMode::Trail, 3.0, 4);
    emit(std::slice::from_ref(&rec), Format::Csv, Some(&path)).unwrap();
    let rows = read_rows(Format::Csv, std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(rows, vec![Row::from(&rec)]);
    assert!(emit(&[], Format::Csv, Some(&path)).is_err());
}

#[test]
fn ratio_of_medians() {
    let recs = vec![
        fake("queens:8", RestoreMode::Trail, 200.0, 7),
        fake("queens:8", RestoreMode::Copy, 100.0, 7),
        fake("queens:6", RestoreMode::Trail, 50.0, 3),
        fake("queens:6", RestoreMode::Copy, 50.0, 3),
        fake("queens:10", RestoreMode::Trail, 1.0, 1),
    ];
    let r = ratio_report(
        &recs,
        |r| r.config.restore == RestoreMode::Trail,
        |r| r.config.restore == RestoreMode::Copy,
    );
    let got: Vec<_> = r.rows.iter().map(|x| (x.instance.as_str(), x.backtracks, x.ratio)).collect();
    assert_eq!(got, vec![("queens:6", 3, 1.0), ("queens:8", 7, 2.0)]);
    assert_eq!(r.warnings.len(), 1);
    assert!(r.warnings[0].starts_with("queens:10"));
}

#[test]
fn repetitions_aggregate_to_the_median() {
    let rec = run_config(&config("queens:8").with_runs(5)).unwrap();
    assert_eq!(rec.runs.len(), 5);
    let solve: Vec<f64> = rec.runs.iter().map(SearchStats::solve_ms).collect();
    assert_eq!(rec.solve_ms_median, median(&solve).unwrap());
    assert_eq!(rec.cov, cov(&solve));
    assert!(rec.runs.iter().all(|s| s.trajectory() == rec.stats().trajectory()));
}

#[test]
fn zero_runs_is_a_config_error() {
    assert!(run_config(&config("queens:8").with_runs(0)).is_err());
    let mut c = config("magic:3");
    c.instance = c.instance.extended(true);
    assert!(run_config(&c).is_err());
}

#[test]
fn matrix_keeps_order_and_trajectories() {
    let restores = [RestoreMode::Trail, RestoreMode::Copy, RestoreMode::copy_recompute(8, 2).unwrap()];
    let configs: Vec<_> = restores
        .iter()
        .map(|&m| config("queens:8").with_restore(m).with_solve_mode(SolveMode::All))
        .collect();
    let parallel = run_matrix(&configs, false);
    let sequential = run_matrix(&configs, true);
    for (p, s) in parallel.iter().zip(&sequential) {
        let (p, s) = (p.as_ref().unwrap(), s.as_ref().unwrap());
        assert_eq!(p.config, s.config);
        assert_eq!(p.stats().trajectory(), s.stats().trajectory());
        assert_eq!(p.stats().solutions, 92);
    }
    let restored: Vec<_> = parallel.iter().map(|r| r.as_ref().unwrap().config.restore).collect();
    assert_eq!(restored, restores);

    let bools: Vec<_> = [BoolMode::NativeBool, BoolMode::IntZeroOne]
        .into_iter()
        .map(|b| {
            let mut c = config("golfers:2,4,4");
            c.instance = c.instance.with_bool_mode(b);
            c
        })
        .collect();
    let out = run_matrix(&bools, false);
    let bt: Vec<_> = out.iter().map(|r| r.as_ref().unwrap().stats().trajectory()).collect();
    assert_eq!(bt[0], bt[1]);
}

#[test]
fn infeasible_instances_are_reported() {
    let rec = run_config(&config("queens:3")).unwrap();
    assert_eq!(rec.outcome, Outcome::Infeasible);
    let rec = run_config(&config("golomb:5")).unwrap();
    assert_eq!(rec.outcome, Outcome::Solved { objective: Some(11) });
}

proptest! {
    #[test]
    fn median_splits_the_sample(xs in prop::collection::vec(-1e6f64..1e6, 1..50)) {
        let m = median(&xs).unwrap();
        let below = xs.iter().filter(|&&x| x < m).count();
        let above = xs.iter().filter(|&&x| x > m).count();
        prop_assert!(below <= xs.len() / 2 && above <= xs.len() / 2);
    }

    #[test]
    fn cov_is_scale_invariant(xs in prop::collection::vec(1.0f64..1e3, 2..30), k in 0.5f64..100.0) {
        let scaled: Vec<f64> = xs.iter().map(|x| x * k).collect();
        let (a, b) = (cov(&xs), cov(&scaled));
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        prop_assert!(a >= 0.0);
    }
}
