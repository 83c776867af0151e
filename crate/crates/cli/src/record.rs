//! Benchmark records and their CSV / JSON encodings.

use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::numfmt::format_number;

pub const SUMMARY_HEADER: [&str; 10] = [
    "function",
    "ps",
    "dim",
    "iters",
    "runs",
    "seed",
    "mode",
    "workers",
    "avg_best_fit",
    "avg_seconds",
];

pub const RUNS_HEADER: [&str; 8] = [
    "function", "ps", "dim", "iters", "mode", "seed", "best_fit", "seconds",
];

/// One benchmark configuration run in one engine mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub function: String,
    pub ps: usize,
    pub dim: usize,
    pub iters: usize,
    pub runs: usize,
    /// First seed; run `r` uses `seed + r`.
    pub seed: u64,
    pub mode: String,
    pub workers: usize,
    pub avg_best_fit: f64,
    pub avg_seconds: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_run: Vec<RunRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub seed: u64,
    pub best_fit: f64,
    pub seconds: f64,
}

/// The summary rows as CSV; per-run detail goes to [`runs_csv`].
pub fn summary_csv(records: &[BenchRecord]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SUMMARY_HEADER).expect("in-memory write");
    for r in records {
        w.write_record([
            r.function.clone(),
            r.ps.to_string(),
            r.dim.to_string(),
            r.iters.to_string(),
            r.runs.to_string(),
            r.seed.to_string(),
            r.mode.clone(),
            r.workers.to_string(),
            format_number(r.avg_best_fit),
            format_number(r.avg_seconds),
        ])
        .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn runs_csv(records: &[BenchRecord]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(RUNS_HEADER).expect("in-memory write");
    for r in records {
        for row in &r.per_run {
            w.write_record([
                r.function.clone(),
                r.ps.to_string(),
                r.dim.to_string(),
                r.iters.to_string(),
                r.mode.clone(),
                row.seed.to_string(),
                format_number(row.best_fit),
                format_number(row.seconds),
            ])
            .expect("in-memory write");
        }
    }
    w.into_inner().expect("in-memory flush")
}

pub fn to_json(records: &[BenchRecord]) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(records).expect("records serialize");
    out.push(b'\n');
    out
}

/// Reads records from either encoding, sniffing JSON by its first byte.
pub fn parse_records(bytes: &[u8], source: &str) -> Result<Vec<BenchRecord>, CliError> {
    let first = bytes.iter().find(|b| !b.is_ascii_whitespace());
    match first {
        Some(b'[') => serde_json::from_slice(bytes)
            .map_err(|e| CliError::Usage(format!("{source}: invalid benchmark JSON: {e}"))),
        Some(b'{') => serde_json::from_slice(bytes)
            .map(|r| vec![r])
            .map_err(|e| CliError::Usage(format!("{source}: invalid benchmark JSON: {e}"))),
        _ => parse_csv(bytes, source),
    }
}

fn parse_csv(bytes: &[u8], source: &str) -> Result<Vec<BenchRecord>, CliError> {
    let bad = |e: csv::Error| CliError::Usage(format!("{source}: invalid benchmark CSV: {e}"));
    let mut r = csv::Reader::from_reader(bytes);
    let header = r.headers().map_err(bad)?.clone();
    if header.iter().ne(SUMMARY_HEADER) {
        return Err(CliError::Usage(format!(
            "{source}: expected CSV header `{}`",
            SUMMARY_HEADER.join(",")
        )));
    }
    r.deserialize().map(|row| row.map_err(bad)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record() -> BenchRecord {
        BenchRecord {
            function: "hgbat".into(),
            ps: 2000,
            dim: 1000,
            iters: 1000,
            runs: 5,
            seed: 42,
            mode: "sequential".into(),
            workers: 1,
            avg_best_fit: 9.01e8,
            avg_seconds: 430.0,
            per_run: vec![RunRow {
                seed: 42,
                best_fit: 9.01e8,
                seconds: 430.0,
            }],
        }
    }

    #[test]
    fn csv_shape() {
        let text = String::from_utf8(summary_csv(&[record()])).unwrap();
        assert_eq!(
            text,
            "function,ps,dim,iters,runs,seed,mode,workers,avg_best_fit,avg_seconds\n\
             hgbat,2000,1000,1000,5,42,sequential,1,9.01E+08,430\n"
        );
        let runs = String::from_utf8(runs_csv(&[record()])).unwrap();
        assert_eq!(
            runs.lines().nth(1),
            Some("hgbat,2000,1000,1000,sequential,42,9.01E+08,430")
        );
    }

    #[test]
    fn both_encodings_parse_back() {
        let mut summary = record();
        let from_csv = parse_records(&summary_csv(&[summary.clone()]), "x").unwrap();
        let from_json = parse_records(&to_json(&[summary.clone()]), "x").unwrap();
        assert_eq!(from_json, vec![summary.clone()]);
        summary.per_run.clear();
        assert_eq!(from_csv, vec![summary]);
    }

    #[test]
    fn wrong_header_is_rejected() {
        let err = parse_records(&runs_csv(&[record()]), "runs.csv").unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
