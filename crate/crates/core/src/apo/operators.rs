//! Per-individual update rules.
//!
//! Rank indices are 1-based throughout this module (`i = 1` is the best
//! individual of the sorted snapshot); slices are indexed with `i - 1`.
//! Every function reads the snapshot immutably and draws only from the
//! individual's own [`Stream`], which is what lets the engine update all
//! individuals concurrently.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::config::ApoConfig;
use super::population::Individual;
use crate::objective::{Bounds, ObjectiveError, ObjectiveId};
use crate::rng::{scale_index, Lane, Stream, UniformSource};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operation {
    Dormancy,
    Reproduction,
    Autotroph,
    Heterotroph,
}

/// Which operation an individual performs this iteration, and why.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpdateDecision {
    pub operation: Operation,
    /// `p_dr` for individuals in the dormancy/reproduction set, `p_ah` otherwise.
    pub threshold: f64,
    /// The uniform compared against `threshold`.
    pub draw: f64,
}

#[inline]
fn ratio(iter: usize, iter_max: usize) -> f64 {
    iter as f64 / iter_max as f64
}

/// `pf = pf_max · rand`, drawn on the coordinator stream.
pub fn proportion_fraction<S: UniformSource + ?Sized>(stream: &Stream<'_, S>, pf_max: f64) -> f64 {
    pf_max * stream.uniform(Lane::Scalar, 0)
}

/// `⌈ps · pf⌉` distinct ranks chosen for dormancy or reproduction.
pub fn select_dr_indices<S: UniformSource + ?Sized>(
    ps: usize,
    pf: f64,
    stream: &Stream<'_, S>,
) -> Vec<usize> {
    let k = ((ps as f64 * pf).ceil() as usize).min(ps);
    stream
        .randperm(Lane::Mask, ps, k)
        .expect("k is capped at ps")
}

/// `½ (1 − cos((1 − i/ps) π))`: 0 for the worst rank, approaching 1 for the best.
pub fn p_dormancy_reproduction(i: usize, ps: usize) -> f64 {
    0.5 * (1.0 - ((1.0 - i as f64 / ps as f64) * PI).cos())
}

/// `½ (1 + cos(iter/iter_max · π))`: 1 at the first iteration, 0 at the last.
pub fn p_autotroph_heterotroph(iter: usize, iter_max: usize) -> f64 {
    0.5 * (1.0 + (ratio(iter, iter_max) * PI).cos())
}

/// `f = rand · (1 + cos(iter/iter_max · π))`.
pub fn foraging_factor<S: UniformSource + ?Sized>(
    stream: &Stream<'_, S>,
    iter: usize,
    iter_max: usize,
) -> f64 {
    stream.uniform(Lane::Scalar, 0) * (1.0 + (ratio(iter, iter_max) * PI).cos())
}

fn mask_from(
    dim: usize,
    ones: usize,
    stream: &Stream<'_, impl UniformSource + ?Sized>,
) -> Vec<bool> {
    let mut mask = vec![false; dim];
    for d in stream
        .randperm(Lane::Mask, dim, ones)
        .expect("ones is capped at dim")
    {
        mask[d - 1] = true;
    }
    mask
}

/// Exactly `⌈dim · rand⌉` dimensions switched on.
pub fn reproduction_mask<S: UniformSource + ?Sized>(
    dim: usize,
    stream: &Stream<'_, S>,
) -> Vec<bool> {
    let ones = ((dim as f64 * stream.uniform(Lane::Scalar, 1)).ceil() as usize).min(dim);
    mask_from(dim, ones, stream)
}

/// Exactly `⌈dim · i/ps⌉` dimensions switched on; better ranks move fewer dimensions.
pub fn forage_mask<S: UniformSource + ?Sized>(
    dim: usize,
    i: usize,
    ps: usize,
    stream: &Stream<'_, S>,
) -> Vec<bool> {
    let ones = (dim * i).div_ceil(ps).min(dim);
    mask_from(dim, ones, stream)
}

#[inline]
fn sign<S: UniformSource + ?Sized>(stream: &Stream<'_, S>) -> f64 {
    if stream.uniform(Lane::Sign, 0) < 0.5 {
        1.0
    } else {
        -1.0
    }
}

/// `exp(−|f⁻ / (f⁺ + eps)|)`, the weight of one neighbor-pair difference.
#[inline]
pub fn neighbor_weight(f_minus: f64, f_plus: f64, eps: f64) -> f64 {
    (-(f_minus / (f_plus + eps)).abs()).exp()
}

/// A fresh uniform position in the box.
pub fn dormancy_update<S: UniformSource + ?Sized>(
    bounds: &Bounds,
    stream: &Stream<'_, S>,
) -> Vec<f64> {
    let (lo, width) = (bounds.lower(), bounds.width());
    stream
        .uniforms(Lane::Vector, bounds.dim())
        .into_iter()
        .map(|u| lo + u * width)
        .collect()
}

/// `X ± rand · (X_min + Rand ⊙ (X_max − X_min)) ⊙ M_r`.
pub fn reproduction_update<S: UniformSource + ?Sized>(
    position: &[f64],
    bounds: &Bounds,
    stream: &Stream<'_, S>,
) -> Vec<f64> {
    let dim = position.len();
    let step = sign(stream) * stream.uniform(Lane::Scalar, 0);
    let mask = reproduction_mask(dim, stream);
    let (lo, width) = (bounds.lower(), bounds.width());
    position
        .iter()
        .zip(&mask)
        .enumerate()
        .map(|(d, (&x, &on))| {
            if on {
                x + step * (lo + stream.uniform(Lane::Vector, d as u64) * width)
            } else {
                x
            }
        })
        .collect()
}

/// Rank `j ≠ i` the autotroph moves toward; `i` itself when it is alone.
pub fn partner_rank<S: UniformSource + ?Sized>(
    i: usize,
    ps: usize,
    stream: &Stream<'_, S>,
) -> usize {
    if ps < 2 {
        return i;
    }
    let j = 1 + scale_index(stream.uniform(Lane::Partner, 0), ps - 1);
    if j >= i {
        j + 1
    } else {
        j
    }
}

/// `np` pairs `(k⁻, k⁺)` with `k⁻` a random better rank and `k⁺` a random
/// worse rank. Rank 1 uses itself as `k⁻`, rank `ps` itself as `k⁺`.
pub fn pair_neighbors_autotroph<S: UniformSource + ?Sized>(
    i: usize,
    ps: usize,
    np: usize,
    stream: &Stream<'_, S>,
) -> Vec<(usize, usize)> {
    (0..np as u64)
        .map(|p| {
            let below = if i <= 1 {
                i
            } else {
                1 + scale_index(stream.uniform(Lane::Partner, 1 + 2 * p), i - 1)
            };
            let above = if i >= ps {
                i
            } else {
                i + 1 + scale_index(stream.uniform(Lane::Partner, 2 + 2 * p), ps - i)
            };
            (below, above)
        })
        .collect()
}

/// `(i − k, i + k)` for `k = 1..=np`, clamped into `[1, ps]`.
pub fn pair_neighbors_heterotroph(i: usize, ps: usize, np: usize) -> Vec<(usize, usize)> {
    (1..=np)
        .map(|k| (i.saturating_sub(k).max(1), (i + k).min(ps)))
        .collect()
}

/// Weighted mean of neighbor differences, one component per masked dimension.
fn neighbor_term(
    snapshot: &[Individual],
    pairs: &[(usize, usize)],
    mask: &[bool],
    eps: f64,
) -> Vec<f64> {
    let mut acc = vec![0.0; mask.len()];
    for &(lo, hi) in pairs {
        let (a, b) = (&snapshot[lo - 1], &snapshot[hi - 1]);
        let w = neighbor_weight(a.fitness, b.fitness, eps);
        for (d, on) in mask.iter().enumerate() {
            if *on {
                acc[d] += w * (a.position[d] - b.position[d]);
            }
        }
    }
    let np = pairs.len() as f64;
    for v in &mut acc {
        *v /= np;
    }
    acc
}

/// `X_i + f · (X_j − X_i + (1/np) Σ w_a (X_{k⁻} − X_{k⁺})) ⊙ M_f`.
pub fn autotroph_update<S: UniformSource + ?Sized>(
    i: usize,
    snapshot: &[Individual],
    cfg: &ApoConfig,
    iter: usize,
    stream: &Stream<'_, S>,
) -> Vec<f64> {
    let ps = snapshot.len();
    let x = &snapshot[i - 1].position;
    let f = foraging_factor(stream, iter, cfg.iter_max());
    let mask = forage_mask(x.len(), i, ps, stream);
    let target = &snapshot[partner_rank(i, ps, stream) - 1].position;
    let pairs = pair_neighbors_autotroph(i, ps, cfg.np, stream);
    let pull = neighbor_term(snapshot, &pairs, &mask, cfg.eps);

    (0..x.len())
        .map(|d| {
            if mask[d] {
                x[d] + f * (target[d] - x[d] + pull[d])
            } else {
                x[d]
            }
        })
        .collect()
}

/// `X_i + f · (X_near − X_i + (1/np) Σ w_h (X_{i−k} − X_{i+k})) ⊙ M_f`
/// with `X_near = (1 ± Rand · (1 − iter/iter_max)) ⊙ X_i`.
pub fn heterotroph_update<S: UniformSource + ?Sized>(
    i: usize,
    snapshot: &[Individual],
    cfg: &ApoConfig,
    iter: usize,
    stream: &Stream<'_, S>,
) -> Vec<f64> {
    let ps = snapshot.len();
    let x = &snapshot[i - 1].position;
    let f = foraging_factor(stream, iter, cfg.iter_max());
    let mask = forage_mask(x.len(), i, ps, stream);
    let spread = sign(stream) * (1.0 - ratio(iter, cfg.iter_max()));
    let pairs = pair_neighbors_heterotroph(i, ps, cfg.np);
    let pull = neighbor_term(snapshot, &pairs, &mask, cfg.eps);

    (0..x.len())
        .map(|d| {
            if mask[d] {
                let near = (1.0 + spread * stream.uniform(Lane::Vector, d as u64)) * x[d];
                x[d] + f * (near - x[d] + pull[d])
            } else {
                x[d]
            }
        })
        .collect()
}

/// Picks the operation for rank `i`.
///
/// Members of the dormancy/reproduction set go dormant when `p_dr > rand`
/// and reproduce otherwise; everyone else forages autotrophically when
/// `p_ah > rand` and heterotrophically otherwise.
pub fn decide_operation<S: UniformSource + ?Sized>(
    i: usize,
    ps: usize,
    in_dr: bool,
    iter: usize,
    iter_max: usize,
    stream: &Stream<'_, S>,
) -> UpdateDecision {
    let draw = stream.uniform(Lane::Decision, 0);
    let (threshold, hit, miss) = if in_dr {
        (
            p_dormancy_reproduction(i, ps),
            Operation::Dormancy,
            Operation::Reproduction,
        )
    } else {
        (
            p_autotroph_heterotroph(iter, iter_max),
            Operation::Autotroph,
            Operation::Heterotroph,
        )
    };
    UpdateDecision {
        operation: if threshold > draw { hit } else { miss },
        threshold,
        draw,
    }
}

/// Result of comparing an individual against its candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub individual: Individual,
    pub accepted: bool,
    /// The candidate's fitness was NaN or infinite and it was discarded.
    pub nonfinite: bool,
}

/// Keeps the strictly better of `old` and the candidate; the old one wins ties.
/// Evaluates the candidate exactly once.
pub fn greedy_select(
    old: &Individual,
    candidate: Vec<f64>,
    objective: &ObjectiveId,
) -> Result<Selection, ObjectiveError> {
    let fitness = objective.evaluate(&candidate)?;
    if !fitness.is_finite() {
        return Ok(Selection {
            individual: old.clone(),
            accepted: false,
            nonfinite: true,
        });
    }
    if fitness < old.fitness {
        Ok(Selection {
            individual: Individual {
                position: candidate,
                fitness,
            },
            accepted: true,
            nonfinite: false,
        })
    } else {
        Ok(Selection {
            individual: old.clone(),
            accepted: false,
            nonfinite: false,
        })
    }
}

/// Everything one worker does for rank `i`: decide, move, clamp, evaluate, select.
#[derive(Debug, Clone, PartialEq)]
pub struct Evolved {
    pub decision: UpdateDecision,
    /// The clamped candidate position before selection.
    pub candidate: Vec<f64>,
    pub selection: Selection,
}

pub fn evolve_individual<S: UniformSource + ?Sized>(
    i: usize,
    snapshot: &[Individual],
    in_dr: bool,
    cfg: &ApoConfig,
    iter: usize,
    objective: &ObjectiveId,
    stream: &Stream<'_, S>,
) -> Result<Evolved, ObjectiveError> {
    let ps = snapshot.len();
    let decision = decide_operation(i, ps, in_dr, iter, cfg.iter_max(), stream);
    let old = &snapshot[i - 1];
    let mut candidate = match decision.operation {
        Operation::Dormancy => dormancy_update(&cfg.bounds, stream),
        Operation::Reproduction => reproduction_update(&old.position, &cfg.bounds, stream),
        Operation::Autotroph => autotroph_update(i, snapshot, cfg, iter, stream),
        Operation::Heterotroph => heterotroph_update(i, snapshot, cfg, iter, stream),
    };
    cfg.bounds.clamp_in_place(&mut candidate);
    let selection = greedy_select(old, candidate.clone(), objective)?;
    Ok(Evolved {
        decision,
        candidate,
        selection,
    })
}
