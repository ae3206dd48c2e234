//! Report rows and their CSV / JSON-lines serializations.
//!
//! The column order is part of the format contract (`REPORT_SCHEMA`); the
//! JSON-lines form mirrors it field for field. Wall-clock time is the only
//! nondeterministic field and is emitted only when timing is requested, so
//! default reports are bit-identical across runs and worker counts.

use serde::Serialize;
use std::io::Write;

use crate::config::ReportFormat;
use crate::error::Result;

pub const REPORT_SCHEMA: &str = "svc-report-v1";

pub const REPORT_COLUMNS: [&str; 13] = [
    "instance",
    "algorithm",
    "n",
    "m",
    "p_min",
    "eps",
    "trials",
    "mean_cover",
    "opt",
    "opt_se",
    "ratio",
    "mean_queries",
    "norm_queries",
];

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ReportRow {
    pub instance: String,
    pub algorithm: String,
    pub n: usize,
    pub m: usize,
    pub p_min: f64,
    pub eps: f64,
    /// Trial count in Monte-Carlo mode; enumerated outcome count in exact
    /// mode.
    pub trials: u64,
    pub mean_cover: f64,
    pub opt: f64,
    /// Standard error of the optimum estimate; 0 when exact.
    pub opt_se: f64,
    /// `mean_cover / opt`, reported as 1 when `opt` is zero.
    pub ratio: f64,
    pub mean_queries: f64,
    /// `mean_queries * eps * p_min / n`.
    pub norm_queries: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
}

fn fmt(v: f64) -> String {
    format!("{v:.9}")
}

pub fn write_rows(
    rows: &[ReportRow],
    format: ReportFormat,
    timing: bool,
    mut sink: impl Write,
) -> Result<()> {
    match format {
        ReportFormat::Csv => {
            let mut writer = csv::Writer::from_writer(&mut sink);
            let mut header: Vec<&str> = REPORT_COLUMNS.to_vec();
            if timing {
                header.push("wall_ms");
            }
            writer.write_record(&header)?;
            for row in rows {
                let mut record = vec![
                    row.instance.clone(),
                    row.algorithm.clone(),
                    row.n.to_string(),
                    row.m.to_string(),
                    fmt(row.p_min),
                    fmt(row.eps),
                    row.trials.to_string(),
                    fmt(row.mean_cover),
                    fmt(row.opt),
                    fmt(row.opt_se),
                    fmt(row.ratio),
                    fmt(row.mean_queries),
                    fmt(row.norm_queries),
                ];
                if timing {
                    record.push(row.wall_ms.unwrap_or(0).to_string());
                }
                writer.write_record(&record)?;
            }
            writer.flush()?;
        }
        ReportFormat::Jsonl => {
            for row in rows {
                let mut stripped = row.clone();
                if !timing {
                    stripped.wall_ms = None;
                }
                serde_json::to_writer(&mut sink, &stripped)
                    .map_err(|e| crate::error::CliError::Config(e.to_string()))?;
                sink.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

impl From<csv::Error> for crate::error::CliError {
    fn from(e: csv::Error) -> Self {
        crate::error::CliError::Config(e.to_string())
    }
}
