//! Shared fixtures for the criterion benchmarks.

use apo_core::rng::CounterRng;
use apo_core::{initialize, ApoConfig, Bounds, EngineMode, ObjectiveId, Population};

/// The `[-100, 100]` box used by every benchmark function.
pub fn config(ps: usize, dim: usize, iterations: usize, seed: u64) -> ApoConfig {
    ApoConfig::new(
        ps,
        Bounds::new(-100.0, 100.0, dim).expect("valid bounds"),
        iterations,
        seed,
    )
}

/// A freshly initialized population, ready to be stepped.
pub fn population(cfg: &ApoConfig, objective: &ObjectiveId) -> Population {
    initialize(cfg, objective, EngineMode::Sequential, &CounterRng).expect("valid benchmark setup")
}

/// Deterministic points spread over the box, for objective timing.
pub fn points(count: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|p| {
            (0..dim)
                .map(|d| ((p * 7919 + d * 104_729) % 20_001) as f64 / 100.0 - 100.0)
                .collect()
        })
        .collect()
}
