//! Flat rows for CSV and JSON output.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use fdlab::RestoreMode;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::runner::RunRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// One output row. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub model: String,
    pub instance: String,
    pub extended: bool,
    pub bool_mode: Option<String>,
    pub sum_mode: String,
    pub restore: String,
    pub rec_dist: Option<u32>,
    pub adapt_dist: Option<u32>,
    pub queue: String,
    pub bnb: Option<String>,
    pub runs: usize,
    pub nodes: u64,
    pub backtracks: u64,
    pub solutions: u64,
    pub setup_ms_median: f64,
    pub solve_ms_median: f64,
    pub cov: f64,
    pub nps: f64,
    pub bytes_copied: u64,
    pub trail_entries: u64,
    pub snapshots: u64,
    pub recomputations: u64,
}

pub const COLUMNS: [&str; 22] = [
    "model", "instance", "extended", "bool_mode", "sum_mode", "restore", "rec_dist", "adapt_dist",
    "queue", "bnb", "runs", "nodes", "backtracks", "solutions", "setup_ms_median",
    "solve_ms_median", "cov", "nps", "bytes_copied", "trail_entries", "snapshots",
    "recomputations",
];

impl From<&RunRecord> for Row {
    fn from(r: &RunRecord) -> Self {
        let c = &r.config;
        let p = &c.instance.problem;
        let s = r.stats();
        let (rec_dist, adapt_dist) = match c.restore {
            RestoreMode::CopyRecompute { distance, adaptive_distance } => {
                (Some(distance), Some(adaptive_distance))
            }
            _ => (None, None),
        };
        Row {
            model: p.class_name().to_string(),
            instance: p.params(),
            extended: c.instance.extended,
            bool_mode: p.is_boolean().then(|| c.instance.bool_mode.as_str().to_string()),
            sum_mode: c.instance.sum_mode.as_str().to_string(),
            restore: c.restore.as_str().to_string(),
            rec_dist,
            adapt_dist,
            queue: c.queue.as_str().to_string(),
            bnb: p.is_optimisation().then(|| c.bnb.as_str().to_string()),
            runs: r.runs.len(),
            nodes: s.nodes,
            backtracks: s.backtracks,
            solutions: s.solutions,
            setup_ms_median: r.setup_ms_median,
            solve_ms_median: r.solve_ms_median,
            cov: r.cov,
            nps: r.nps(),
            bytes_copied: s.restore.bytes_copied,
            trail_entries: s.restore.trail_entries,
            snapshots: s.restore.snapshots_taken,
            recomputations: s.restore.recomputations,
        }
    }
}

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("nothing to write")]
    Empty,
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub fn write_rows<W: Write>(rows: &[Row], format: Format, out: W) -> Result<(), EmitError> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for row in rows {
                w.serialize(row)?;
            }
            w.flush().map_err(|source| EmitError::Io { path: "<output>".into(), source })?;
        }
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, rows)?;
            writeln!(out).map_err(|source| EmitError::Io { path: "<output>".into(), source })?;
        }
    }
    Ok(())
}

pub fn read_rows<R: io::Read>(format: Format, input: R) -> Result<Vec<Row>, EmitError> {
    Ok(match format {
        Format::Csv => csv::Reader::from_reader(input).deserialize().collect::<Result<_, _>>()?,
        Format::Json => serde_json::from_reader(input)?,
    })
}

/// Writes `records` to `path`, or to standard output when `path` is `None`.
pub fn emit(records: &[RunRecord], format: Format, path: Option<&Path>) -> Result<(), EmitError> {
    if records.is_empty() {
        return Err(EmitError::Empty);
    }
    let rows: Vec<Row> = records.iter().map(Row::from).collect();
    match path {
        Some(p) => {
            let file = File::create(p)
                .map_err(|source| EmitError::Io { path: p.display().to_string(), source })?;
            write_rows(&rows, format, io::BufWriter::new(file))
        }
        None => write_rows(&rows, format, io::stdout().lock()),
    }
}
