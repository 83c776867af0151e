use super::{GrayImage, Histogram};
use crate::apo::ApoConfig;
use crate::engine::{run, EngineError, EngineMode, RunResult};
use crate::objective::{Bounds, External, ObjectiveId};

/// The search interval of the threshold variable.
pub const THRESHOLD_BOUNDS: (f64, f64) = (0.0, 255.0);

/// `ω₀ ω₁ (μ₀ − μ₁)²` with class 0 holding intensities `≤ t`.
///
/// Zero when either class is empty. Depends only on count ratios, so scaling
/// every count by the same factor leaves the result bit-identical.
pub fn between_class_variance(h: &Histogram, t: u8) -> f64 {
    let counts = h.counts();
    let (mut n0, mut s0) = (0u64, 0u64);
    for (v, &c) in counts.iter().enumerate().take(t as usize + 1) {
        n0 += c;
        s0 += v as u64 * c;
    }
    let s_all: u64 = counts.iter().enumerate().map(|(v, &c)| v as u64 * c).sum();
    let n1 = h.total() - n0;
    if n0 == 0 || n1 == 0 {
        return 0.0;
    }
    let total = h.total() as f64;
    let (w0, w1) = (n0 as f64 / total, n1 as f64 / total);
    let mu0 = s0 as f64 / n0 as f64;
    let mu1 = (s_all - s0) as f64 / n1 as f64;
    let gap = mu0 - mu1;
    w0 * w1 * gap * gap
}

/// Exhaustive search over all 256 thresholds; the smallest `t` wins ties.
pub fn brute_force_otsu(h: &Histogram) -> (u8, f64) {
    let mut best = (0u8, between_class_variance(h, 0));
    for t in 1..=255u8 {
        let v = between_class_variance(h, t);
        if v > best.1 {
            best = (t, v);
        }
    }
    best
}

/// Rounds half up and clamps into `0..=255`.
fn threshold_of(x: f64) -> u8 {
    (x + 0.5)
        .floor()
        .clamp(THRESHOLD_BOUNDS.0, THRESHOLD_BOUNDS.1) as u8
}

/// `x ↦ −σ_b²(round(x))`, a 1-D minimization problem over `[0, 255]`.
pub fn threshold_objective(h: &Histogram) -> ObjectiveId {
    let h = h.clone();
    ObjectiveId::External(External::new("otsu", 1, move |x| {
        -between_class_variance(&h, threshold_of(x[0]))
    }))
}

#[derive(Debug, Clone)]
pub struct ThresholdOutcome {
    pub threshold: u8,
    pub variance: f64,
    pub run: RunResult,
}

/// Searches for the Otsu threshold with the optimizer.
///
/// `base` supplies population size, iterations, seed and the other tunables;
/// its dimension and bounds are replaced by the 1-D `[0, 255]` interval.
pub fn apo_threshold(
    img: &GrayImage,
    base: &ApoConfig,
    mode: EngineMode,
) -> Result<ThresholdOutcome, EngineError> {
    let h = img.histogram();
    let mut cfg = base.clone();
    cfg.bounds = Bounds::new(THRESHOLD_BOUNDS.0, THRESHOLD_BOUNDS.1, 1).expect("constant bounds");
    cfg.dim = 1;
    let result = run(&cfg, &threshold_objective(&h), mode)?;
    let threshold = threshold_of(result.best_position[0]);
    Ok(ThresholdOutcome {
        threshold,
        variance: between_class_variance(&h, threshold),
        run: result,
    })
}

/// Binarizes: `≤ t` becomes 0, everything else 255.
pub fn apply_threshold(img: &GrayImage, t: u8) -> GrayImage {
    let pixels = img
        .pixels()
        .iter()
        .map(|&p| if p <= t { 0 } else { 255 })
        .collect();
    GrayImage::new(img.width(), img.height(), pixels).expect("same shape")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn image(pixels: Vec<u8>) -> GrayImage {
        let n = pixels.len();
        GrayImage::new(n, 1, pixels).unwrap()
    }

    fn two_spike() -> GrayImage {
        image([50u8, 150].repeat(8))
    }

    #[test]
    fn degenerate_image_has_zero_variance() {
        let h = image(vec![90; 16]).histogram();
        assert!((0..=255).all(|t| between_class_variance(&h, t) == 0.0));
        assert_eq!(brute_force_otsu(&h), (0, 0.0));
    }

    #[test]
    fn two_spike_values() {
        let h = two_spike().histogram();
        assert_eq!(between_class_variance(&h, 100), 2500.0);
        assert_eq!(between_class_variance(&h, 49), 0.0);
        assert_eq!(between_class_variance(&h, 150), 0.0);
        assert_eq!(brute_force_otsu(&h), (50, 2500.0));
        assert_eq!(between_class_variance(&h, 149), 2500.0);
    }

    #[test]
    fn oracle_dominates_every_threshold() {
        let pixels: Vec<u8> = (0..500u32)
            .map(|i| ((i * i * 7 + 13) % 256) as u8)
            .collect();
        let h = image(pixels).histogram();
        let (_, best) = brute_force_otsu(&h);
        assert!((0..=255).all(|t| between_class_variance(&h, t) <= best));
    }

    #[test]
    fn scaling_counts_is_invariant() {
        let pixels: Vec<u8> = (0..300u32).map(|i| ((i * 37) % 200 + 20) as u8).collect();
        let h = image(pixels.clone()).histogram();
        let h3 = image(pixels.repeat(3)).histogram();
        for t in 0..=255 {
            assert_eq!(
                between_class_variance(&h, t).to_bits(),
                between_class_variance(&h3, t).to_bits()
            );
        }
    }

    #[test]
    fn rounding_is_half_up() {
        assert_eq!(threshold_of(0.0), 0);
        assert_eq!(threshold_of(49.4999), 49);
        assert_eq!(threshold_of(49.5), 50);
        assert_eq!(threshold_of(255.0), 255);
    }

    #[test]
    fn apo_matches_oracle_on_two_spikes() {
        let img = two_spike();
        let cfg = ApoConfig::new(100, Bounds::new(0.0, 1.0, 1).unwrap(), 50, 7);
        let out = apo_threshold(&img, &cfg, EngineMode::Sequential).unwrap();
        assert_eq!(out.variance, brute_force_otsu(&img.histogram()).1);
        assert!((50..150).contains(&out.threshold));
        assert_eq!(out.run.best_fitness, -out.variance);
        let again = apo_threshold(&img, &cfg, EngineMode::parallel(3)).unwrap();
        assert_eq!(again.threshold, out.threshold);
    }

    #[test]
    fn binarize() {
        let img = image(vec![0, 255, 100, 101]);
        assert_eq!(apply_threshold(&img, 255).pixels(), &[0, 0, 0, 0]);
        assert_eq!(apply_threshold(&img, 100).pixels(), &[0, 255, 0, 255]);
        assert!(apply_threshold(&img, 37)
            .pixels()
            .iter()
            .all(|&p| p == 0 || p == 255));
    }
}
