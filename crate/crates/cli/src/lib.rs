//! Command-line front end: `bench`, `threshold` and `report`.
//!
//! Exit codes: 0 success, 1 failed self-check or run, 2 invalid usage or
//! configuration, 3 I/O failure, 4 malformed image.

pub mod bench;
pub mod error;
pub mod numfmt;
pub mod output;
pub mod record;
pub mod report;
pub mod threshold;

use std::ffi::OsString;
use std::io::Write;

use apo_core::{EngineMode, Workers};
use clap::{Parser, Subcommand};

pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "apo",
    version,
    about = "Artificial protozoa optimizer benchmarks and thresholding"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Time the optimizer on a benchmark function.
    Bench(bench::BenchArgs),
    /// Find an Otsu threshold for an image.
    Threshold(threshold::ThresholdArgs),
    /// Merge benchmark outputs into a speedup table.
    Report(report::ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum EngineChoice {
    Seq,
    Par,
    Both,
}

impl EngineChoice {
    pub fn modes(self, workers: Workers) -> Vec<EngineMode> {
        match self {
            EngineChoice::Seq => vec![EngineMode::Sequential],
            EngineChoice::Par => vec![EngineMode::Parallel(workers)],
            EngineChoice::Both => vec![EngineMode::Sequential, EngineMode::Parallel(workers)],
        }
    }
}

pub(crate) fn parse_workers(s: &str) -> Result<Workers, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(Workers::Auto);
    }
    s.parse::<usize>()
        .ok()
        .and_then(Workers::fixed)
        .ok_or_else(|| format!("expected a positive integer or `auto`, got `{s}`"))
}

/// Parses `args` (including the program name) and runs the chosen command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                2
            } else {
                let _ = stdout.write_all(text.as_bytes());
                0
            };
        }
    };
    let result = match &cli.command {
        Command::Bench(a) => bench::execute(a, stdout, stderr),
        Command::Threshold(a) => threshold::execute(a, stdout, stderr),
        Command::Report(a) => report::execute(a, stdout, stderr),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
