use std::io::Write;
use std::path::PathBuf;

use apo_core::imaging::{
    apo_threshold, apply_threshold, brute_force_otsu, load_image, write_pgm, GrayImage, PgmFormat,
};
use apo_core::{ApoConfig, Bounds, Workers};
use clap::Args;

use crate::error::CliError;
use crate::numfmt::format_number;
use crate::output::{ensure_parent_dir, read_file, write_atomically};
use crate::{parse_workers, EngineChoice};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum EmitFormat {
    P2,
    P5,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    /// PGM or PPM input (maxval 255).
    #[arg(long)]
    pub image: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub ps: usize,
    #[arg(long, default_value_t = 50)]
    pub iters: usize,
    #[arg(long, default_value_t = 5)]
    pub runs: usize,
    #[arg(long, env = "PROTOZOA_SEED", default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = EngineChoice::Both)]
    pub engine: EngineChoice,
    #[arg(long, default_value = "auto", value_parser = parse_workers)]
    pub workers: Workers,
    #[arg(long, default_value_t = 0.1)]
    pub pf_max: f64,
    #[arg(long, default_value_t = 1)]
    pub np: usize,
    /// Write the image binarized at the last run's threshold.
    #[arg(long)]
    pub emit: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = EmitFormat::P5)]
    pub emit_format: EmitFormat,
    /// Compare every run against exhaustive search; exit 1 on mismatch.
    #[arg(long)]
    pub verify: bool,
}

pub fn execute(
    args: &ThresholdArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let bytes = read_file(&args.image)?;
    let img = load_image(&bytes).map_err(|source| CliError::Image {
        path: args.image.clone(),
        source,
    })?;
    if args.runs == 0 {
        return Err(CliError::Usage("--runs must be at least 1".into()));
    }
    if let Some(emit) = &args.emit {
        ensure_parent_dir(emit)?;
    }
    let base = ApoConfig::new(
        args.ps,
        Bounds::new(0.0, 255.0, 1).expect("constant bounds"),
        args.iters,
        args.seed,
    )
    .with_np(args.np)
    .with_pf_max(args.pf_max);
    base.validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let out = |s: &mut dyn Write, line: String| {
        s.write_all(line.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e))
    };
    out(
        stdout,
        format!(
            "image {} ({}x{}), ps {}, iters {}\n",
            args.image.display(),
            img.width(),
            img.height(),
            args.ps,
            args.iters
        ),
    )?;
    out(
        stdout,
        format!(
            "{:<14} {:>4} {:>20} {:>8} {:>12} {:>12}\n",
            "Mode", "Run", "Seed", "Best Th.", "Variance", "Time (s)"
        ),
    )?;

    let oracle = brute_force_otsu(&img.histogram());
    let mut mismatches = Vec::new();
    let mut last: Option<u8> = None;
    for mode in args.engine.modes(args.workers) {
        let (mut th_sum, mut time_sum) = (0.0, 0.0);
        for r in 0..args.runs {
            let seed = args.seed.wrapping_add(r as u64);
            let outcome = apo_threshold(&img, &base.clone().with_seed(seed), mode)?;
            th_sum += f64::from(outcome.threshold);
            time_sum += outcome.run.wall_clock_seconds;
            out(
                stdout,
                format!(
                    "{:<14} {:>4} {:>20} {:>8} {:>12} {:>12}\n",
                    mode.to_string(),
                    r + 1,
                    seed,
                    outcome.threshold,
                    format_number(outcome.variance),
                    format_number(outcome.run.wall_clock_seconds)
                ),
            )?;
            if outcome.variance != oracle.1 {
                mismatches.push(format!(
                    "{mode} seed {seed}: threshold {} variance {} below optimum {}",
                    outcome.threshold,
                    format_number(outcome.variance),
                    format_number(oracle.1)
                ));
            }
            last = Some(outcome.threshold);
        }
        let n = args.runs as f64;
        out(
            stdout,
            format!(
                "{:<14} Avg. Best Th. {}  Avg. Time (s) {}\n",
                mode.to_string(),
                format_number(th_sum / n),
                format_number(time_sum / n)
            ),
        )?;
    }

    if let (Some(path), Some(t)) = (&args.emit, last) {
        let format = match args.emit_format {
            EmitFormat::P2 => PgmFormat::Plain,
            EmitFormat::P5 => PgmFormat::Raw,
        };
        let binary: GrayImage = apply_threshold(&img, t);
        write_atomically(&[(path.clone(), write_pgm(&binary, format))])?;
        out(
            stdout,
            format!("wrote {} (threshold {t})\n", path.display()),
        )?;
    }

    if args.verify {
        out(
            stdout,
            format!(
                "oracle: threshold {} variance {}\n",
                oracle.0,
                format_number(oracle.1)
            ),
        )?;
        if !mismatches.is_empty() {
            for m in &mismatches {
                let _ = writeln!(stderr, "verify: {m}");
            }
            return Err(CliError::Failed(format!(
                "{} run(s) missed the optimal variance",
                mismatches.len()
            )));
        }
        out(stdout, "verify: ok\n".into())?;
    }
    Ok(())
}
