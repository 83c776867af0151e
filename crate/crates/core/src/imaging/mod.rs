//! Grayscale images and Otsu thresholding driven by the optimizer.

mod otsu;
mod pnm;

pub use otsu::{
    apo_threshold, apply_threshold, between_class_variance, brute_force_otsu, threshold_objective,
    ThresholdOutcome, THRESHOLD_BOUNDS,
};
pub use pnm::{load_image, luminance, write_pgm, PgmFormat};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ImageError {
    #[error("malformed image at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("{width}x{height} image needs {expected} pixels, got {got}")]
    Size {
        width: usize,
        height: usize,
        expected: usize,
        got: usize,
    },
}

/// 8-bit grayscale raster, row major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self, ImageError> {
        let expected = width * height;
        if width == 0 || height == 0 || pixels.len() != expected {
            return Err(ImageError::Size {
                width,
                height,
                expected,
                got: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn histogram(&self) -> Histogram {
        histogram(self)
    }
}

/// Pixel counts per intensity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    counts: [u64; 256],
    total: u64,
}

impl Histogram {
    /// `None` when every count is zero.
    pub fn from_counts(counts: [u64; 256]) -> Option<Self> {
        let total = counts.iter().sum();
        (total > 0).then_some(Self { counts, total })
    }

    pub fn counts(&self) -> &[u64; 256] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }
}

pub fn histogram(img: &GrayImage) -> Histogram {
    let mut counts = [0u64; 256];
    for &p in img.pixels() {
        counts[p as usize] += 1;
    }
    Histogram {
        counts,
        total: img.pixels().len() as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_counts() {
        let h = GrayImage::new(2, 2, vec![7; 4]).unwrap().histogram();
        assert_eq!(h.counts()[7], 4);
        assert_eq!(h.counts().iter().sum::<u64>(), 4);
        assert_eq!(h.total(), 4);

        let h = GrayImage::new(2, 1, vec![0, 255]).unwrap().histogram();
        assert_eq!((h.counts()[0], h.counts()[255]), (1, 1));
    }

    #[test]
    fn size_is_checked() {
        assert!(GrayImage::new(2, 2, vec![0; 3]).is_err());
        assert!(GrayImage::new(0, 2, vec![]).is_err());
        assert!(Histogram::from_counts([0; 256]).is_none());
    }
}
