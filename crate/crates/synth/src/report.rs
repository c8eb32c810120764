//! Coverage and cost table.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::orchestrator::RunRecord;

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("no run records to report")]
    EmptyReport,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub domain: String,
    pub configuration: String,
    pub solved: usize,
    pub attempted: usize,
    pub mean_api_seconds: f64,
    pub mean_compile_seconds: f64,
    pub mean_search_seconds: f64,
    /// Per heuristic request, summed over its phases.
    pub mean_input_tokens: f64,
    pub mean_output_tokens: f64,
    /// Failed compilations over all compilations.
    pub compile_failure_rate: f64,
}

fn ratio(num: f64, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num / den as f64
    }
}

/// One row per (domain, configuration), sorted by both.
pub fn summarize(records: &[RunRecord]) -> Vec<ReportRow> {
    let mut groups: BTreeMap<(&str, &str), Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((&r.domain, &r.configuration)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((domain, configuration), rs)| {
            let n = rs.len();
            let sum = |f: fn(&RunRecord) -> f64| rs.iter().map(|r| f(r)).sum::<f64>();
            let requests: usize = rs.iter().map(|r| r.requests()).sum();
            let compiles: usize = rs.iter().map(|r| r.compile_attempts()).sum();
            ReportRow {
                domain: domain.to_string(),
                configuration: configuration.to_string(),
                solved: rs.iter().filter(|r| r.solved()).count(),
                attempted: n,
                mean_api_seconds: ratio(sum(|r| r.api_seconds), n),
                mean_compile_seconds: ratio(sum(|r| r.compile_seconds), n),
                mean_search_seconds: ratio(sum(|r| r.search_seconds), n),
                mean_input_tokens: ratio(sum(|r| r.input_tokens as f64), requests),
                mean_output_tokens: ratio(sum(|r| r.output_tokens as f64), requests),
                compile_failure_rate: ratio(rs.iter().map(|r| r.compile_failures()).sum::<usize>() as f64, compiles),
            }
        })
        .collect()
}

pub fn write_csv<W: std::io::Write>(records: &[RunRecord], out: W) -> Result<Vec<ReportRow>, ReportError> {
    if records.is_empty() {
        return Err(ReportError::EmptyReport);
    }
    let rows = summarize(records);
    let mut w = csv::Writer::from_writer(out);
    for row in &rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(rows)
}

pub fn report(records: &[RunRecord], out: &Path) -> Result<Vec<ReportRow>, ReportError> {
    if records.is_empty() {
        return Err(ReportError::EmptyReport);
    }
    write_csv(records, std::fs::File::create(out)?)
}
