use std::collections::BTreeMap;

use crate::runner::RunRecord;

#[derive(Debug, Clone, PartialEq)]
pub struct RatioRow {
    pub instance: String,
    pub backtracks: u64,
    /// Numerator median solve time over denominator median solve time.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RatioReport {
    /// Sorted by backtracks, then instance.
    pub rows: Vec<RatioRow>,
    /// Instances that lacked one side of the pair.
    pub warnings: Vec<String>,
}

/// Pairs records by instance and divides median solve times, keyed by the
/// backtrack count of the denominator run.
pub fn ratio_report(
    records: &[RunRecord],
    numerator: impl Fn(&RunRecord) -> bool,
    denominator: impl Fn(&RunRecord) -> bool,
) -> RatioReport {
    let mut num: BTreeMap<String, &RunRecord> = BTreeMap::new();
    let mut den: BTreeMap<String, &RunRecord> = BTreeMap::new();
    for r in records {
        let key = r.config.instance.problem.to_string();
        if numerator(r) {
            num.entry(key.clone()).or_insert(r);
        }
        if denominator(r) {
            den.entry(key).or_insert(r);
        }
    }
    let mut report = RatioReport::default();
    for (key, n) in &num {
        match den.get(key) {
            Some(d) => report.rows.push(RatioRow {
                instance: key.clone(),
                backtracks: d.stats().backtracks,
                ratio: n.solve_ms_median / d.solve_ms_median.max(1e-9),
            }),
            None => report.warnings.push(format!("{key}: no denominator run")),
        }
    }
    for key in den.keys().filter(|k| !num.contains_key(*k)) {
        report.warnings.push(format!("{key}: no numerator run"));
    }
    report.rows.sort_by(|a, b| a.backtracks.cmp(&b.backtracks).then_with(|| a.instance.cmp(&b.instance)));
    report
}
