use std::io::Write;
use std::path::PathBuf;

use apo_core::{benchmark_mode, ApoConfig, Benchmark, Bounds, ModeSummary, ObjectiveId, Workers};
use clap::Args;

use crate::error::CliError;
use crate::output::{ensure_parent_dir, write_atomically};
use crate::record::{runs_csv, summary_csv, to_json, BenchRecord, RunRow};
use crate::{parse_workers, EngineChoice};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Objective id.
    #[arg(long, value_parser = parse_benchmark)]
    pub function: Benchmark,
    #[arg(long, default_value_t = 1000)]
    pub ps: usize,
    #[arg(long, default_value_t = 1000)]
    pub dim: usize,
    #[arg(long, default_value_t = 1000)]
    pub iters: usize,
    /// Repetitions per mode, seeded `seed, seed+1, ...`.
    #[arg(long, default_value_t = 5)]
    pub runs: usize,
    #[arg(long, env = "PROTOZOA_SEED", default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = EngineChoice::Both)]
    pub engine: EngineChoice,
    /// Worker threads for the parallel engine, or `auto`.
    #[arg(long, default_value = "auto", value_parser = parse_workers)]
    pub workers: Workers,
    #[arg(long, default_value_t = -100.0, allow_negative_numbers = true)]
    pub lower: f64,
    #[arg(long, default_value_t = 100.0, allow_negative_numbers = true)]
    pub upper: f64,
    #[arg(long, default_value_t = 0.1)]
    pub pf_max: f64,
    #[arg(long, default_value_t = 1)]
    pub np: usize,
    /// Destination file; CSV output also writes `<out>.runs.csv`. Defaults to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

fn parse_benchmark(s: &str) -> Result<Benchmark, String> {
    s.parse()
        .map_err(|e: apo_core::ObjectiveError| e.to_string())
}

pub fn record(function: &str, cfg: &ApoConfig, summary: &ModeSummary) -> BenchRecord {
    BenchRecord {
        function: function.to_string(),
        ps: cfg.ps,
        dim: cfg.dim,
        iters: cfg.max_iterations,
        runs: summary.runs.len(),
        seed: cfg.seed,
        mode: if summary.mode.is_parallel() {
            "parallel"
        } else {
            "sequential"
        }
        .into(),
        workers: summary.workers,
        avg_best_fit: summary.avg_best_fitness,
        avg_seconds: summary.avg_seconds,
        per_run: summary
            .runs
            .iter()
            .map(|r| RunRow {
                seed: r.seed,
                best_fit: r.best_fitness,
                seconds: r.seconds,
            })
            .collect(),
    }
}

pub fn execute(
    args: &BenchArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let bounds = Bounds::new(args.lower, args.upper, args.dim)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let cfg = ApoConfig::new(args.ps, bounds, args.iters, args.seed)
        .with_np(args.np)
        .with_pf_max(args.pf_max);
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let objective = ObjectiveId::from(args.function);
    objective
        .check_dim(args.dim)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    if args.runs == 0 {
        return Err(CliError::Usage("--runs must be at least 1".into()));
    }

    if let Some(out) = &args.out {
        ensure_parent_dir(out)?;
    }

    let mut records = Vec::new();
    for mode in args.engine.modes(args.workers) {
        let summary = benchmark_mode(&cfg, &objective, args.runs, mode)?;
        let _ = writeln!(
            stderr,
            "{} {}: avg best {} in {} s",
            args.function,
            mode,
            crate::numfmt::format_number(summary.avg_best_fitness),
            crate::numfmt::format_number(summary.avg_seconds)
        );
        records.push(record(args.function.id(), &cfg, &summary));
    }

    let main = match args.format {
        OutputFormat::Csv => summary_csv(&records),
        OutputFormat::Json => to_json(&records),
    };
    match &args.out {
        None => stdout
            .write_all(&main)
            .map_err(|e| CliError::io("<stdout>", e)),
        Some(path) => {
            let mut files = vec![(path.clone(), main)];
            if args.format == OutputFormat::Csv {
                files.push((runs_path(path), runs_csv(&records)));
            }
            write_atomically(&files)?;
            for (p, _) in &files {
                let _ = writeln!(stdout, "wrote {}", p.display());
            }
            Ok(())
        }
    }
}

/// `results.csv` → `results.csv.runs.csv`.
pub fn runs_path(out: &std::path::Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".runs.csv");
    PathBuf::from(s)
}
