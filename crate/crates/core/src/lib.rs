//! Artificial Protozoa Optimizer.
//!
//! A population-based minimizer whose individuals forage (autotrophically or
//! heterotrophically), go dormant, or reproduce each iteration, with greedy
//! replacement. Two executors share one code path: [`EngineMode::Sequential`]
//! and [`EngineMode::Parallel`], which updates individuals on worker threads
//! and yields bit-identical results for the same seed.
//!
//! ```
//! use apo_core::{run, ApoConfig, Benchmark, Bounds, EngineMode};
//!
//! let cfg = ApoConfig::new(50, Bounds::new(-100.0, 100.0, 10).unwrap(), 200, 42);
//! let seq = run(&cfg, &Benchmark::Sphere.into(), EngineMode::Sequential).unwrap();
//! let par = run(&cfg, &Benchmark::Sphere.into(), EngineMode::parallel(4)).unwrap();
//! assert!(seq.same_outcome(&par));
//! assert!(seq.best_fitness < seq.trace[0]);
//! ```

pub mod apo;
pub mod engine;
pub mod imaging;
pub mod objective;
pub mod rng;

pub use apo::{ApoConfig, ConfigError, Individual, Operation, Population, UpdateDecision};
pub use engine::{
    benchmark, benchmark_mode, initialize, run, run_with, step, BenchmarkReport, EngineError,
    EngineMode, ModeSummary, RunResult, RunSummary, Workers,
};
pub use imaging::{GrayImage, Histogram, ImageError};
pub use objective::{clamp, evaluate, Benchmark, Bounds, External, ObjectiveError, ObjectiveId};
pub use rng::{
    draw_uniform, draw_uniform_vector, randperm, CounterRng, RngError, StreamKey, UniformSource,
};
