use std::collections::HashMap;
use std::io::Write;
use std::path::PathBuf;

use clap::Args;

use crate::error::CliError;
use crate::numfmt::{format_number, format_speedup};
use crate::output::{read_file, write_atomically};
use crate::record::{parse_records, BenchRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Benchmark outputs (CSV or JSON) to merge.
    #[arg(long = "in", required = true, num_args = 1..)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Markdown)]
    pub format: ReportFormat,
    /// Destination file; defaults to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Side {
    Seq,
    Par,
}

type JoinKey = (String, usize, usize, usize, u64);

/// A sequential record matched with its parallel counterpart.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub function: String,
    pub ps: usize,
    pub dim: usize,
    pub iters: usize,
    pub seed: u64,
    pub seq_fit: f64,
    pub seq_time: f64,
    pub par_fit: f64,
    pub par_time: f64,
    pub speedup: f64,
}

/// Pairs records on `(function, ps, dim, iters, seed)`.
///
/// Returns the joined rows in first-seen order and a description of every
/// record left without a partner. Differing repeat counts or contradicting
/// duplicates are errors.
pub fn join(records: &[BenchRecord]) -> Result<(Vec<ReportRow>, Vec<String>), CliError> {
    let mut order: Vec<JoinKey> = Vec::new();
    let mut sides: HashMap<JoinKey, [Option<&BenchRecord>; 2]> = HashMap::new();
    for r in records {
        let side = side_of(&r.mode)?;
        let key = (r.function.clone(), r.ps, r.dim, r.iters, r.seed);
        let slot = sides.entry(key.clone()).or_insert_with(|| {
            order.push(key.clone());
            [None, None]
        });
        let cell = &mut slot[side as usize];
        match cell {
            Some(prev) if !same_summary(prev, r) => {
                return Err(CliError::Usage(format!(
                    "conflicting {} records for {}",
                    r.mode,
                    describe(&key)
                )))
            }
            Some(_) => {}
            None => *cell = Some(r),
        }
    }

    let mut rows = Vec::new();
    let mut unmatched = Vec::new();
    for key in order {
        match sides[&key] {
            [Some(s), Some(p)] => {
                if s.runs != p.runs {
                    return Err(CliError::Usage(format!(
                        "{}: sequential used {} runs but parallel used {}",
                        describe(&key),
                        s.runs,
                        p.runs
                    )));
                }
                rows.push(ReportRow {
                    function: key.0,
                    ps: key.1,
                    dim: key.2,
                    iters: key.3,
                    seed: key.4,
                    seq_fit: s.avg_best_fit,
                    seq_time: s.avg_seconds,
                    par_fit: p.avg_best_fit,
                    par_time: p.avg_seconds,
                    speedup: s.avg_seconds / p.avg_seconds,
                });
            }
            [Some(_), None] => unmatched.push(format!(
                "{}: sequential record has no parallel partner",
                describe(&key)
            )),
            [None, Some(_)] => unmatched.push(format!(
                "{}: parallel record has no sequential partner",
                describe(&key)
            )),
            [None, None] => unreachable!("every key has at least one record"),
        }
    }
    Ok((rows, unmatched))
}

fn side_of(mode: &str) -> Result<Side, CliError> {
    let m = mode.to_ascii_lowercase();
    if m.starts_with("seq") {
        Ok(Side::Seq)
    } else if m.starts_with("par") {
        Ok(Side::Par)
    } else {
        Err(CliError::Usage(format!(
            "unknown mode `{mode}` (expected sequential or parallel)"
        )))
    }
}

fn same_summary(a: &BenchRecord, b: &BenchRecord) -> bool {
    a.runs == b.runs
        && a.workers == b.workers
        && a.avg_best_fit.to_bits() == b.avg_best_fit.to_bits()
        && a.avg_seconds.to_bits() == b.avg_seconds.to_bits()
}

fn describe(key: &JoinKey) -> String {
    format!(
        "{} ps={} dim={} iters={} seed={}",
        key.0, key.1, key.2, key.3, key.4
    )
}

pub fn markdown(rows: &[ReportRow]) -> String {
    let mut s = String::from(
        "| No. | Function | PS | Seq Fit | Seq Time | Par Fit | Par Time | Speedup |\n\
         |---:|---|---:|---:|---:|---:|---:|---:|\n",
    );
    for (i, r) in rows.iter().enumerate() {
        s.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} | {} | {} |\n",
            i + 1,
            r.function,
            r.ps,
            format_number(r.seq_fit),
            format_number(r.seq_time),
            format_number(r.par_fit),
            format_number(r.par_time),
            format_speedup(r.speedup)
        ));
    }
    s
}

pub fn csv(rows: &[ReportRow]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "no", "function", "ps", "dim", "iters", "seed", "seq_fit", "seq_time", "par_fit",
        "par_time", "speedup",
    ])
    .expect("in-memory write");
    for (i, r) in rows.iter().enumerate() {
        w.write_record([
            (i + 1).to_string(),
            r.function.clone(),
            r.ps.to_string(),
            r.dim.to_string(),
            r.iters.to_string(),
            r.seed.to_string(),
            format_number(r.seq_fit),
            format_number(r.seq_time),
            format_number(r.par_fit),
            format_number(r.par_time),
            format_speedup(r.speedup),
        ])
        .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn execute(
    args: &ReportArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let mut records = Vec::new();
    for path in &args.inputs {
        let bytes = read_file(path)?;
        records.extend(parse_records(&bytes, &path.display().to_string())?);
    }
    let (rows, unmatched) = join(&records)?;
    for u in &unmatched {
        let _ = writeln!(stderr, "unmatched: {u}");
    }
    let body = match args.format {
        ReportFormat::Markdown => markdown(&rows).into_bytes(),
        ReportFormat::Csv => csv(&rows),
    };
    match &args.out {
        None => stdout
            .write_all(&body)
            .map_err(|e| CliError::io("<stdout>", e)),
        Some(path) => write_atomically(&[(path.clone(), body)]),
    }
}
