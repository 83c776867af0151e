//! The four-protozoa, three-dimension sphere example, replayed through the
//! real step pipeline with scripted draws.
//!
//! Each scripted value is solved from the example positions by inverting the
//! update rules, so the step has to reproduce the example numbers.

#![allow(dead_code)]

use std::collections::HashMap;
use std::f64::consts::PI;

use apo_core::rng::{Lane, StreamKey, UniformSource, COORDINATOR};
use apo_core::{ApoConfig, Benchmark, Bounds, Individual, ObjectiveId, Population};

/// Step 1 positions, in the order they were listed (unsorted).
pub const INITIAL: [[f64; 3]; 4] = [
    [4.8, 7.8, 9.4],
    [3.4, 8.4, 9.0],
    [1.4, 5.0, 8.0],
    [4.5, 1.2, 4.7],
];
/// Step 1 fitness values.
pub const INITIAL_FITNESS: [f64; 4] = [172.24, 163.12, 90.96, 43.78];
/// Step 2 fitness order.
pub const SORTED_FITNESS: [f64; 4] = [43.78, 90.96, 163.12, 172.24];
/// Step 5 unclamped candidates, by rank.
pub const CANDIDATES: [[f64; 3]; 4] = [
    [4.5, 1.77, 4.7],
    [1.4, 13.53, 11.53],
    [2.9, 8.38, 9.11],
    [4.26, 6.32, 8.07],
];
/// Step 6 clamped candidate of rank 2.
pub const CLAMPED_RANK2: [f64; 3] = [1.4, 10.0, 10.0];
/// Step 6 accept (true) / keep-old (false) pattern, by rank.
pub const ACCEPTED: [bool; 4] = [false, false, true, true];
/// Step 6 population for the next iteration, by rank.
pub const FINAL: [[f64; 3]; 4] = [
    [4.5, 1.2, 4.7],
    [1.4, 5.0, 8.0],
    [2.9, 8.38, 9.11],
    [4.26, 6.32, 8.07],
];
/// The selected dormancy/reproduction rank (Step 3).
pub const DR_RANK: usize = 2;

/// The example is the first move where heterotrophic foraging is reachable:
/// iteration 1 of a 1000-iteration schedule.
pub const ITER: usize = 1;
pub const MAX_ITERATIONS: usize = 1000;

pub fn config() -> ApoConfig {
    ApoConfig::new(4, Bounds::new(0.0, 10.0, 3).unwrap(), MAX_ITERATIONS, 0).with_pf_max(0.1)
}

pub fn objective() -> ObjectiveId {
    Benchmark::Sphere.into()
}

pub fn initial_population() -> Population {
    let obj = objective();
    Population::new(
        INITIAL
            .iter()
            .map(|p| Individual::evaluated(p.to_vec(), &obj).unwrap())
            .collect(),
    )
}

/// Draws keyed by `(individual, lane, offset)`; anything unscripted is 0.5.
pub struct ScriptedSource {
    draws: HashMap<(u64, Lane, u64), f64>,
}

impl UniformSource for ScriptedSource {
    fn uniform(&self, key: StreamKey) -> f64 {
        let (lane, offset) = Lane::split(key.draw_counter).expect("lane counter");
        *self
            .draws
            .get(&(key.individual, lane, offset))
            .unwrap_or(&0.5)
    }
}

fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn weight(f_minus: f64, f_plus: f64) -> f64 {
    (-(f_minus / (f_plus + f64::EPSILON)).abs()).exp()
}

/// Solves every draw the example implies.
pub fn scripted_source() -> ScriptedSource {
    let x: Vec<Vec<f64>> = SORTED_START.iter().map(|p| p.to_vec()).collect();
    let f: Vec<f64> = x.iter().map(|p| sphere(p)).collect();
    let ratio = ITER as f64 / (MAX_ITERATIONS - 1) as f64;
    let cosine_gain = 1.0 + (ratio * PI).cos();
    let mut d = HashMap::new();

    // Coordinator: pf = 0.05 so one rank is chosen; the first shuffle draw picks rank 2.
    d.insert((COORDINATOR, Lane::Scalar, 0), 0.5);
    d.insert((COORDINATOR, Lane::Mask, 0), 0.3);

    // Rank 1, autotroph on dimension 2 only, toward rank 2, pair (1, 2).
    d.insert((1, Lane::Decision, 0), 0.1);
    d.insert((1, Lane::Mask, 0), 0.5);
    d.insert((1, Lane::Partner, 0), 0.1);
    d.insert((1, Lane::Partner, 2), 0.1);
    let inner = x[1][1] - x[0][1] + weight(f[0], f[1]) * (x[0][1] - x[1][1]);
    d.insert(
        (1, Lane::Scalar, 0),
        (CANDIDATES[0][1] - x[0][1]) / (inner * cosine_gain),
    );

    // Rank 2, reproduction with a plus sign on dimensions 2 and 3.
    let step = 0.9;
    d.insert((2, Lane::Decision, 0), 0.7);
    d.insert((2, Lane::Sign, 0), 0.25);
    d.insert((2, Lane::Scalar, 0), step);
    d.insert((2, Lane::Scalar, 1), 0.5);
    d.insert((2, Lane::Mask, 0), 0.5);
    d.insert((2, Lane::Mask, 1), 0.75);
    for dim in [1usize, 2] {
        let rand = (CANDIDATES[1][dim] - x[1][dim]) / (step * 10.0);
        d.insert((2, Lane::Vector, dim as u64), rand);
    }

    // Rank 3, heterotroph on all dimensions with a plus sign, pair (2, 4).
    d.insert((3, Lane::Decision, 0), 0.999_999_9);
    d.insert((3, Lane::Sign, 0), 0.25);
    d.insert((3, Lane::Scalar, 0), 0.5);
    let forage = 0.5 * cosine_gain;
    let w = weight(f[1], f[3]);
    for dim in 0..3 {
        let pull = w * (x[1][dim] - x[3][dim]);
        let near_offset = (CANDIDATES[2][dim] - x[2][dim]) / forage - pull;
        let rand = near_offset / ((1.0 - ratio) * x[2][dim]);
        d.insert((3, Lane::Vector, dim as u64), rand);
    }

    // Rank 4, autotroph on all dimensions toward rank 3, pair (1, 4);
    // the step size is the least-squares fit to the example move.
    d.insert((4, Lane::Decision, 0), 0.1);
    d.insert((4, Lane::Partner, 0), 0.9);
    d.insert((4, Lane::Partner, 1), 0.1);
    let w = weight(f[0], f[3]);
    let dir: Vec<f64> = (0..3)
        .map(|k| x[2][k] - x[3][k] + w * (x[0][k] - x[3][k]))
        .collect();
    let delta: Vec<f64> = (0..3).map(|k| CANDIDATES[3][k] - x[3][k]).collect();
    let fit = dir.iter().zip(&delta).map(|(a, b)| a * b).sum::<f64>()
        / dir.iter().map(|a| a * a).sum::<f64>();
    d.insert((4, Lane::Scalar, 0), fit / cosine_gain);

    for v in d.values() {
        assert!((0.0..1.0).contains(v), "scripted draw {v} outside [0, 1)");
    }
    ScriptedSource { draws: d }
}

/// Step 2 positions, by rank.
pub const SORTED_START: [[f64; 3]; 4] = [
    [4.5, 1.2, 4.7],
    [1.4, 5.0, 8.0],
    [3.4, 8.4, 9.0],
    [4.8, 7.8, 9.4],
];

/// Within half a unit in the second decimal place.
pub fn agrees_to_2dp(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 0.005 + 1e-12)
}
