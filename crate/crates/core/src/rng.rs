//! Counter-based uniform random source.
//!
//! Every random number used by the optimizer is a pure function of a
//! [`StreamKey`]: `(seed, iteration, individual, draw_counter)`. Nothing is
//! carried between draws, so any worker can reproduce any draw without
//! coordinating with the others, and the sequential and parallel engines see
//! exactly the same values.
//!
//! The 256-bit key is compressed to 64 bits with the SplitMix64 finalizer
//! applied per field, then the top 53 bits are scaled into `[0, 1)`.
//!
//! # Counter layout
//!
//! Within one `(seed, iteration, individual)` stream the counter is split into
//! a [`Lane`] (bits 48..64) and an offset (bits 0..48). Each lane is reserved
//! for one kind of draw, so the number of counters an update consumes never
//! depends on which branch another draw selected:
//!
//! | lane        | offsets        | used for                                      |
//! |-------------|----------------|-----------------------------------------------|
//! | `Decision`  | 0              | operation choice against `p_dr` / `p_ah`      |
//! | `Sign`      | 0              | the `±` of reproduction and `X_near`          |
//! | `Scalar`    | 0, 1           | step `rand` (0); reproduction mask size (1)   |
//! | `Vector`    | 0..dim         | the elementwise `Rand` vector                 |
//! | `Mask`      | 0..k           | partial Fisher-Yates draws of a `randperm`    |
//! | `Partner`   | 0, 1+2p, 2+2p  | partner rank `j`; pair `p` lower/upper ranks  |
//! | `Init`      | 0..dim         | initial positions                             |
//!
//! Coordinator draws (proportion fraction and the dormancy/reproduction index
//! set) use [`COORDINATOR`] as the individual index, `Scalar` offset 0 and the
//! `Mask` lane respectively.

use thiserror::Error;

/// Individual index reserved for per-iteration coordinator draws.
pub const COORDINATOR: u64 = u64::MAX;

const LANE_SHIFT: u32 = 48;
const OFFSET_MASK: u64 = (1 << LANE_SHIFT) - 1;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;
const SEED_SALT: u64 = 0x6a09_e667_f3bc_c908;
const ITER_SALT: u64 = 0xbb67_ae85_84ca_a73b;
const INDIVIDUAL_SALT: u64 = 0x3c6e_f372_fe94_f82b;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RngError {
    #[error("vector length must be at least 1")]
    EmptyVector,
    #[error("cannot choose {k} distinct indices out of {n}")]
    SampleTooLarge { n: usize, k: usize },
}

/// Identifies a single uniform draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub seed: u64,
    pub iteration: u64,
    pub individual: u64,
    pub draw_counter: u64,
}

impl StreamKey {
    pub const fn new(seed: u64, iteration: u64, individual: u64, draw_counter: u64) -> Self {
        Self {
            seed,
            iteration,
            individual,
            draw_counter,
        }
    }

    /// The same stream, `n` counters further on.
    #[must_use]
    pub const fn advanced(self, n: u64) -> Self {
        Self {
            draw_counter: self.draw_counter.wrapping_add(n),
            ..self
        }
    }
}

/// Reserved counter ranges inside one individual's per-iteration stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Lane {
    Decision = 0,
    Sign = 1,
    Scalar = 2,
    Vector = 3,
    Mask = 4,
    Partner = 5,
    Init = 6,
}

impl Lane {
    /// Counter value of `offset` within this lane.
    pub const fn counter(self, offset: u64) -> u64 {
        ((self as u64) << LANE_SHIFT) | (offset & OFFSET_MASK)
    }

    /// Inverse of [`Lane::counter`]; `None` for counters outside every lane.
    pub fn split(counter: u64) -> Option<(Lane, u64)> {
        let lane = match counter >> LANE_SHIFT {
            0 => Lane::Decision,
            1 => Lane::Sign,
            2 => Lane::Scalar,
            3 => Lane::Vector,
            4 => Lane::Mask,
            5 => Lane::Partner,
            6 => Lane::Init,
            _ => return None,
        };
        Some((lane, counter & OFFSET_MASK))
    }
}

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
fn stream_base(seed: u64, iteration: u64, individual: u64) -> u64 {
    let h = mix64(seed ^ SEED_SALT);
    let h = mix64(h ^ iteration.wrapping_mul(ITER_SALT));
    mix64(h ^ individual.wrapping_mul(INDIVIDUAL_SALT))
}

#[inline]
fn to_unit(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// 64 hashed bits for `key`.
#[inline]
pub fn hash_key(key: StreamKey) -> u64 {
    let base = stream_base(key.seed, key.iteration, key.individual);
    mix64(base.wrapping_add(key.draw_counter.wrapping_add(1).wrapping_mul(GOLDEN)))
}

/// Uniform value in `[0, 1)` determined entirely by `key`.
#[inline]
pub fn draw_uniform(key: StreamKey) -> f64 {
    to_unit(hash_key(key))
}

/// `dim` uniforms; element `j` is the draw at `key.draw_counter + j`.
pub fn draw_uniform_vector(key: StreamKey, dim: usize) -> Result<Vec<f64>, RngError> {
    CounterRng.uniform_vector(key, dim)
}

/// `k` distinct 1-based indices out of `1..=n`, in draw order.
///
/// Runs the first `k` steps of a Fisher-Yates shuffle, step `t` consuming
/// the draw at `key.draw_counter + t`.
pub fn randperm(n: usize, k: usize, key: StreamKey) -> Result<Vec<usize>, RngError> {
    randperm_with(&CounterRng, n, k, key)
}

/// [`randperm`] over an arbitrary source.
pub fn randperm_with<S: UniformSource + ?Sized>(
    source: &S,
    n: usize,
    k: usize,
    key: StreamKey,
) -> Result<Vec<usize>, RngError> {
    if k > n {
        return Err(RngError::SampleTooLarge { n, k });
    }
    let mut pool: Vec<usize> = (1..=n).collect();
    for t in 0..k {
        let remaining = n - t;
        let u = source.uniform(key.advanced(t as u64));
        let pick = t + scale_index(u, remaining);
        pool.swap(t, pick);
    }
    pool.truncate(k);
    Ok(pool)
}

/// Maps `u ∈ [0, 1)` to `0..len`.
#[inline]
pub fn scale_index(u: f64, len: usize) -> usize {
    debug_assert!(len > 0);
    ((u * len as f64) as usize).min(len - 1)
}

/// Anything that can answer "what is the uniform for this key?".
///
/// The optimizer is generic over this so tests can inject scripted draws.
pub trait UniformSource: Sync {
    fn uniform(&self, key: StreamKey) -> f64;

    fn uniform_vector(&self, key: StreamKey, dim: usize) -> Result<Vec<f64>, RngError> {
        if dim == 0 {
            return Err(RngError::EmptyVector);
        }
        Ok((0..dim as u64)
            .map(|j| self.uniform(key.advanced(j)))
            .collect())
    }
}

/// The production source: a stateless hash of the key.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CounterRng;

impl UniformSource for CounterRng {
    #[inline]
    fn uniform(&self, key: StreamKey) -> f64 {
        draw_uniform(key)
    }
}

/// A view of one `(seed, iteration, individual)` stream over some source.
#[derive(Debug)]
pub struct Stream<'a, S: ?Sized> {
    source: &'a S,
    seed: u64,
    iteration: u64,
    individual: u64,
}

impl<S: ?Sized> Clone for Stream<'_, S> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<S: ?Sized> Copy for Stream<'_, S> {}

impl<'a, S: UniformSource + ?Sized> Stream<'a, S> {
    pub fn new(source: &'a S, seed: u64, iteration: u64, individual: u64) -> Self {
        Self {
            source,
            seed,
            iteration,
            individual,
        }
    }

    pub fn individual(&self) -> u64 {
        self.individual
    }

    pub fn key(&self, lane: Lane, offset: u64) -> StreamKey {
        StreamKey::new(
            self.seed,
            self.iteration,
            self.individual,
            lane.counter(offset),
        )
    }

    pub fn uniform(&self, lane: Lane, offset: u64) -> f64 {
        self.source.uniform(self.key(lane, offset))
    }

    /// `len` draws from the start of `lane`. Returns an empty vector for `len == 0`.
    pub fn uniforms(&self, lane: Lane, len: usize) -> Vec<f64> {
        (0..len as u64).map(|j| self.uniform(lane, j)).collect()
    }

    pub fn randperm(&self, lane: Lane, n: usize, k: usize) -> Result<Vec<usize>, RngError> {
        randperm_with(self.source, n, k, self.key(lane, 0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn key(counter: u64) -> StreamKey {
        StreamKey::new(7, 3, 11, counter)
    }

    #[test]
    fn same_key_same_value() {
        assert_eq!(
            draw_uniform(key(5)).to_bits(),
            draw_uniform(key(5)).to_bits()
        );
    }

    #[test]
    fn every_key_field_matters() {
        let base = draw_uniform(StreamKey::new(1, 2, 3, 4));
        for other in [
            StreamKey::new(0, 2, 3, 4),
            StreamKey::new(1, 0, 3, 4),
            StreamKey::new(1, 2, 0, 4),
            StreamKey::new(1, 2, 3, 0),
        ] {
            assert_ne!(base, draw_uniform(other));
        }
    }

    #[test]
    fn million_consecutive_counters() {
        const N: u64 = 1_000_000;
        let draws: Vec<f64> = (0..N).map(|c| draw_uniform(key(c))).collect();
        assert!(draws.iter().all(|u| (0.0..1.0).contains(u)));

        let mean = draws.iter().sum::<f64>() / N as f64;
        assert!((mean - 0.5).abs() < 0.01, "mean {mean}");

        // Lag-1 serial correlation of a good uniform source is ~N(0, 1/N).
        let var = draws.iter().map(|u| (u - mean).powi(2)).sum::<f64>();
        let cov = draws
            .windows(2)
            .map(|w| (w[0] - mean) * (w[1] - mean))
            .sum::<f64>();
        assert!(
            (cov / var).abs() < 0.005,
            "serial correlation {}",
            cov / var
        );

        // 16-bin chi-square, 15 dof: 99.9th percentile ≈ 37.7.
        let mut bins = [0u64; 16];
        for u in &draws {
            bins[(u * 16.0) as usize] += 1;
        }
        let expected = N as f64 / 16.0;
        let chi2: f64 = bins
            .iter()
            .map(|&b| (b as f64 - expected).powi(2) / expected)
            .sum();
        assert!(chi2 < 37.7, "chi2 {chi2}");

        // Birthday bound at 53 bits: expected collisions ≈ N²/2^54 ≈ 5.5e-5.
        let distinct: HashSet<u64> = draws.iter().map(|u| u.to_bits()).collect();
        assert_eq!(distinct.len(), N as usize);
    }

    #[test]
    fn vector_matches_scalar_draws() {
        let v = draw_uniform_vector(key(10), 3).unwrap();
        let scalars: Vec<f64> = (10..13).map(|c| draw_uniform(key(c))).collect();
        assert_eq!(v, scalars);
        assert_eq!(
            draw_uniform_vector(key(4), 1).unwrap(),
            vec![draw_uniform(key(4))]
        );
    }

    #[test]
    fn zero_length_vector_rejected() {
        assert_eq!(draw_uniform_vector(key(0), 0), Err(RngError::EmptyVector));
    }

    #[test]
    fn randperm_edges() {
        assert!(randperm(9, 0, key(0)).unwrap().is_empty());
        let mut all = randperm(6, 6, key(0)).unwrap();
        all.sort_unstable();
        assert_eq!(all, vec![1, 2, 3, 4, 5, 6]);
        let one = randperm(4, 1, key(0)).unwrap();
        assert_eq!(one.len(), 1);
        assert!((1..=4).contains(&one[0]));
        assert_eq!(
            randperm(3, 4, key(0)),
            Err(RngError::SampleTooLarge { n: 3, k: 4 })
        );
    }

    #[test]
    fn randperm_is_uniform_over_first_pick() {
        let mut hits = [0u32; 5];
        for s in 0..50_000u64 {
            let p = randperm(5, 2, StreamKey::new(s, 0, 0, 0)).unwrap();
            hits[p[0] - 1] += 1;
        }
        for h in hits {
            assert!((h as f64 / 10_000.0 - 1.0).abs() < 0.05, "{hits:?}");
        }
    }

    #[test]
    fn lanes_do_not_overlap() {
        let lanes = [
            Lane::Decision,
            Lane::Sign,
            Lane::Scalar,
            Lane::Vector,
            Lane::Mask,
            Lane::Partner,
            Lane::Init,
        ];
        let counters: HashSet<u64> = lanes
            .iter()
            .flat_map(|l| (0..1000).map(move |o| l.counter(o)))
            .collect();
        assert_eq!(counters.len(), lanes.len() * 1000);
        for l in lanes {
            assert_eq!(Lane::split(l.counter(17)), Some((l, 17)));
        }
        assert_eq!(Lane::split(u64::MAX), None);
    }

    #[test]
    fn scale_index_never_reaches_len() {
        let just_below_one = f64::from_bits(1.0f64.to_bits() - 1);
        for len in [1usize, 2, 3, 7, 1000, (1 << 53) - 1] {
            assert!(scale_index(just_below_one, len) < len);
        }
    }

    proptest! {
        #[test]
        fn randperm_has_no_duplicates(n in 0usize..=10_000, frac in 0.0f64..=1.0, seed: u64) {
            let k = ((n as f64) * frac) as usize;
            let p = randperm(n, k, StreamKey::new(seed, 0, 0, 0)).unwrap();
            prop_assert_eq!(p.len(), k);
            let set: HashSet<usize> = p.iter().copied().collect();
            prop_assert_eq!(set.len(), k);
            prop_assert!(p.iter().all(|&i| (1..=n).contains(&i)));
        }
    }
}
