//! Full optimization runs with interchangeable sequential and data-parallel executors.
//!
//! An iteration is a short coordinator prologue (sort, draw `pf`, choose the
//! dormancy/reproduction set) followed by one independent update per
//! individual. Updates read the sorted pre-step snapshot and write only their
//! own output slot, so the parallel executor splits the ranks into contiguous
//! blocks, one per worker, and joins the workers before the next iteration.
//! Because every draw is keyed by `(seed, iteration, rank, counter)`, both
//! executors produce bit-identical populations for any worker count.

use std::fmt;
use std::num::NonZeroUsize;
use std::thread;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::apo::{
    evolve_individual, proportion_fraction, select_dr_indices, ApoConfig, ConfigError, Individual,
    Population,
};
use crate::objective::{ObjectiveError, ObjectiveId};
use crate::rng::{CounterRng, Lane, Stream, UniformSource, COORDINATOR};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("objective rejected the problem: {0}")]
    Objective(#[from] ObjectiveError),
    #[error("evaluating individual {index}: {source}")]
    Individual {
        index: usize,
        #[source]
        source: ObjectiveError,
    },
    #[error("initial individual {index} has non-finite fitness {fitness}")]
    NonFiniteInitial { index: usize, fitness: f64 },
    #[error("benchmark needs at least one run")]
    NoRuns,
}

/// Worker count for the parallel executor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Workers {
    /// Whatever `std::thread::available_parallelism` reports.
    Auto,
    Fixed(NonZeroUsize),
}

impl Workers {
    pub fn fixed(n: usize) -> Option<Self> {
        NonZeroUsize::new(n).map(Workers::Fixed)
    }

    pub fn resolve(self) -> usize {
        match self {
            Workers::Auto => available_workers(),
            Workers::Fixed(n) => n.get(),
        }
    }
}

pub fn available_workers() -> usize {
    thread::available_parallelism().map_or(1, NonZeroUsize::get)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineMode {
    Sequential,
    Parallel(Workers),
}

impl EngineMode {
    pub fn parallel(workers: usize) -> Self {
        EngineMode::Parallel(Workers::fixed(workers).unwrap_or(Workers::Auto))
    }

    pub fn workers(self) -> usize {
        match self {
            EngineMode::Sequential => 1,
            EngineMode::Parallel(w) => w.resolve(),
        }
    }

    pub fn is_parallel(self) -> bool {
        matches!(self, EngineMode::Parallel(_))
    }
}

impl fmt::Display for EngineMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineMode::Sequential => f.write_str("sequential"),
            EngineMode::Parallel(Workers::Auto) => f.write_str("parallel(auto)"),
            EngineMode::Parallel(Workers::Fixed(n)) => write!(f, "parallel({n})"),
        }
    }
}

/// Outcome of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub objective: String,
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    /// Best fitness after initialization, then after every iteration.
    pub trace: Vec<f64>,
    pub iterations: u64,
    pub fe_count: u64,
    pub nonfinite_rejections: u64,
    pub wall_clock_seconds: f64,
    pub mode: EngineMode,
    /// Resolved worker count (1 for sequential runs).
    pub workers: usize,
    pub config: ApoConfig,
}

impl RunResult {
    /// True when everything but timing and execution mode matches bit for bit.
    pub fn same_outcome(&self, other: &RunResult) -> bool {
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        self.objective == other.objective
            && bits(&self.best_position) == bits(&other.best_position)
            && self.best_fitness.to_bits() == other.best_fitness.to_bits()
            && bits(&self.trace) == bits(&other.trace)
            && self.iterations == other.iterations
            && self.fe_count == other.fe_count
            && self.nonfinite_rejections == other.nonfinite_rejections
            && self.config == other.config
    }
}

/// Runs `f(0..n)` and returns the results in index order.
///
/// With more than one worker the indices are cut into contiguous blocks of
/// `⌈n / workers⌉`, each handled by its own scoped thread.
fn map_indices<T, F>(n: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = workers.min(n).max(1);
    if workers == 1 {
        return (0..n).map(f).collect();
    }
    let block = n.div_ceil(workers);
    let f = &f;
    thread::scope(|scope| {
        let handles: Vec<_> = (0..n)
            .step_by(block)
            .map(|start| {
                let end = (start + block).min(n);
                scope.spawn(move || (start..end).map(f).collect::<Vec<T>>())
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}

fn first_error<T>(results: Vec<Result<T, EngineError>>) -> Result<Vec<T>, EngineError> {
    results.into_iter().collect()
}

/// Draws and evaluates the initial population (iteration key 0, `Init` lane).
pub fn initialize<S: UniformSource + ?Sized>(
    cfg: &ApoConfig,
    objective: &ObjectiveId,
    mode: EngineMode,
    source: &S,
) -> Result<Population, EngineError> {
    cfg.validate()?;
    objective.check_dim(cfg.dim)?;
    let (lo, width) = (cfg.bounds.lower(), cfg.bounds.width());

    let individuals = first_error(map_indices(cfg.ps, mode.workers(), |slot| {
        let stream = Stream::new(source, cfg.seed, 0, slot as u64 + 1);
        let mut position: Vec<f64> = stream
            .uniforms(Lane::Init, cfg.dim)
            .into_iter()
            .map(|u| lo + u * width)
            .collect();
        cfg.bounds.clamp_in_place(&mut position);
        let ind = Individual::evaluated(position, objective).map_err(|source| {
            EngineError::Individual {
                index: slot + 1,
                source,
            }
        })?;
        if !ind.fitness.is_finite() {
            return Err(EngineError::NonFiniteInitial {
                index: slot + 1,
                fitness: ind.fitness,
            });
        }
        Ok(ind)
    }))?;
    Ok(Population::new(individuals))
}

/// One iteration: sort, coordinator draws, then every individual in parallel.
pub fn step<S: UniformSource + ?Sized>(
    mut pop: Population,
    cfg: &ApoConfig,
    objective: &ObjectiveId,
    iter: usize,
    mode: EngineMode,
    source: &S,
) -> Result<Population, EngineError> {
    pop.sort_by_fitness();
    let ps = pop.len();
    let iteration_key = iter as u64;

    let coordinator = Stream::new(source, cfg.seed, iteration_key, COORDINATOR);
    let pf = proportion_fraction(&coordinator, cfg.pf_max);
    let mut in_dr = vec![false; ps];
    for rank in select_dr_indices(ps, pf, &coordinator) {
        in_dr[rank - 1] = true;
    }

    let snapshot = &pop.individuals;
    let selections = first_error(map_indices(ps, mode.workers(), |slot| {
        let rank = slot + 1;
        let stream = Stream::new(source, cfg.seed, iteration_key, rank as u64);
        evolve_individual(rank, snapshot, in_dr[slot], cfg, iter, objective, &stream)
            .map(|e| e.selection)
            .map_err(|source| EngineError::Individual {
                index: rank,
                source,
            })
    }))?;

    let rejected = selections.iter().filter(|s| s.nonfinite).count() as u64;
    pop.individuals = selections.into_iter().map(|s| s.individual).collect();
    pop.iteration += 1;
    pop.fe_count += ps as u64;
    pop.nonfinite_rejections += rejected;
    Ok(pop)
}

/// Runs to completion with the production random source.
pub fn run(
    cfg: &ApoConfig,
    objective: &ObjectiveId,
    mode: EngineMode,
) -> Result<RunResult, EngineError> {
    run_with(cfg, objective, mode, &CounterRng, |_| {})
}

/// Runs to completion, calling `observe` after initialization and after every iteration.
pub fn run_with<S, O>(
    cfg: &ApoConfig,
    objective: &ObjectiveId,
    mode: EngineMode,
    source: &S,
    mut observe: O,
) -> Result<RunResult, EngineError>
where
    S: UniformSource + ?Sized,
    O: FnMut(&Population),
{
    let workers = mode.workers();
    let started = Instant::now();

    let mut pop = initialize(cfg, objective, mode, source)?;
    observe(&pop);
    let mut trace = Vec::with_capacity(cfg.max_iterations + 1);
    trace.push(pop.best().expect("validated ps >= 1").fitness);

    for iter in 0..cfg.max_iterations {
        if cfg.max_fes.is_some_and(|budget| pop.fe_count >= budget) {
            break;
        }
        pop = step(pop, cfg, objective, iter, mode, source)?;
        observe(&pop);
        trace.push(pop.best().expect("population never shrinks").fitness);
    }

    let wall_clock_seconds = started.elapsed().as_secs_f64();
    let best = pop.best().expect("population never shrinks");
    Ok(RunResult {
        objective: objective.name().to_owned(),
        best_position: best.position.clone(),
        best_fitness: best.fitness,
        trace,
        iterations: pop.iteration,
        fe_count: pop.fe_count,
        nonfinite_rejections: pop.nonfinite_rejections,
        wall_clock_seconds,
        mode,
        workers,
        config: cfg.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub best_fitness: f64,
    pub seconds: f64,
}

/// Averages over repeated runs in one mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSummary {
    pub mode: EngineMode,
    pub workers: usize,
    pub runs: Vec<RunSummary>,
    pub avg_best_fitness: f64,
    pub avg_seconds: f64,
}

/// Sequential against parallel on the same seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub sequential: ModeSummary,
    pub parallel: ModeSummary,
    /// Average sequential seconds over average parallel seconds.
    pub speedup: f64,
}

/// Runs seeds `cfg.seed, cfg.seed + 1, …` in a single mode.
pub fn benchmark_mode(
    cfg: &ApoConfig,
    objective: &ObjectiveId,
    runs: usize,
    mode: EngineMode,
) -> Result<ModeSummary, EngineError> {
    if runs == 0 {
        return Err(EngineError::NoRuns);
    }
    let mut summaries = Vec::with_capacity(runs);
    let mut workers = mode.workers();
    for r in 0..runs {
        let seeded = cfg.clone().with_seed(cfg.seed.wrapping_add(r as u64));
        let result = run(&seeded, objective, mode)?;
        workers = result.workers;
        summaries.push(RunSummary {
            seed: seeded.seed,
            best_fitness: result.best_fitness,
            seconds: result.wall_clock_seconds,
        });
    }
    let n = runs as f64;
    Ok(ModeSummary {
        mode,
        workers,
        avg_best_fitness: summaries.iter().map(|s| s.best_fitness).sum::<f64>() / n,
        avg_seconds: summaries.iter().map(|s| s.seconds).sum::<f64>() / n,
        runs: summaries,
    })
}

pub fn benchmark(
    cfg: &ApoConfig,
    objective: &ObjectiveId,
    runs: usize,
    workers: Workers,
) -> Result<BenchmarkReport, EngineError> {
    let sequential = benchmark_mode(cfg, objective, runs, EngineMode::Sequential)?;
    let parallel = benchmark_mode(cfg, objective, runs, EngineMode::Parallel(workers))?;
    let speedup = sequential.avg_seconds / parallel.avg_seconds;
    Ok(BenchmarkReport {
        sequential,
        parallel,
        speedup,
    })
}
