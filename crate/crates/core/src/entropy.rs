//! Local block-entropy estimation.
//!
//! Each pixel gets the Shannon entropy (in bits) of the empirical
//! intensity histogram of the k x k block centered on it. Intensities are
//! quantized to 256 levels before histogramming and the image border is
//! replicate-padded, so every block contributes exactly k^2 samples and
//! the entropy is bounded by `log2(k^2)` everywhere.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::{quantize_u8, GrayImage};

/// Per-pixel raw entropy values in bits, together with the block size
/// that produced them.
#[derive(Debug, Clone)]
pub struct EntropyMap {
    width: usize,
    height: usize,
    raw: Vec<f64>,
    block_size: usize,
}

impl EntropyMap {
    /// Wraps precomputed entropy values, checking the block size and the
    /// `0 <= raw <= log2(k^2)` bound.
    pub fn new(width: usize, height: usize, raw: Vec<f64>, block_size: usize) -> Result<Self> {
        check_block_size(block_size)?;
        if raw.len() != width * height {
            return Err(Error::InvalidParameter(format!(
                "entropy count {} does not match {width}x{height}",
                raw.len()
            )));
        }
        let hi = ((block_size * block_size) as f64).log2();
        if let Some(bad) = raw.iter().find(|v| !(0.0..=hi).contains(v)) {
            return Err(Error::InvalidParameter(format!(
                "entropy {bad} outside [0, log2(k^2)] = [0, {hi}]"
            )));
        }
        Ok(Self {
            width,
            height,
            raw,
            block_size,
        })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn raw(&self) -> &[f64] {
        &self.raw
    }

    #[inline]
    pub fn block_size(&self) -> usize {
        self.block_size
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.raw[y * self.width + x]
    }

    /// Largest entropy a block of this size can attain.
    pub fn max_possible(&self) -> f64 {
        ((self.block_size * self.block_size) as f64).log2()
    }
}

/// Entropy map normalized and quantized to bytes, with the affine range
/// `(low, high)` that was mapped onto 0..=255.
#[derive(Debug, Clone)]
pub struct QuantizedEntropyMap {
    width: usize,
    height: usize,
    levels: Vec<u8>,
    normalization: (f64, f64),
}

impl QuantizedEntropyMap {
    /// Wraps precomputed levels with the normalization record that
    /// produced them.
    pub fn new(
        width: usize,
        height: usize,
        levels: Vec<u8>,
        normalization: (f64, f64),
    ) -> Result<Self> {
        if levels.len() != width * height {
            return Err(Error::InvalidParameter(format!(
                "level count {} does not match {width}x{height}",
                levels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            levels,
            normalization,
        })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn levels(&self) -> &[u8] {
        &self.levels
    }

    #[inline]
    pub fn normalization(&self) -> (f64, f64) {
        self.normalization
    }
}

/// How raw entropies are mapped onto 0..=255.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntropyNorm {
    /// Per-image affine stretch from (min, max) to (0, 255).
    MinMax,
    /// Fixed scale against the theoretical maximum `log2(k^2)`.
    Fixed,
}

fn check_block_size(k: usize) -> Result<()> {
    if k < 3 || k % 2 == 0 {
        return Err(Error::InvalidParameter(format!(
            "block size must be an odd integer >= 3, got {k}"
        )));
    }
    Ok(())
}

/// Shannon entropy in bits of the k x k block centered at `(x, y)`,
/// replicate-padded at the borders.
pub fn block_entropy(img: &GrayImage, x: usize, y: usize, k: usize) -> Result<f64> {
    check_block_size(k)?;
    let (w, h) = img.dimensions();
    if x >= w || y >= h {
        return Err(Error::InvalidParameter(format!(
            "block center ({x}, {y}) outside {w}x{h} image"
        )));
    }
    Ok(block_entropy_unchecked(img, x, y, k))
}

fn block_entropy_unchecked(img: &GrayImage, x: usize, y: usize, k: usize) -> f64 {
    let (w, h) = img.dimensions();
    let r = (k / 2) as isize;
    let mut hist = [0u32; 256];
    for dy in -r..=r {
        let yy = (y as isize + dy).clamp(0, h as isize - 1) as usize;
        for dx in -r..=r {
            let xx = (x as isize + dx).clamp(0, w as isize - 1) as usize;
            hist[quantize_u8(img.get(xx, yy)) as usize] += 1;
        }
    }
    let total = (k * k) as f64;
    let mut entropy = 0.0;
    for &count in hist.iter() {
        if count > 0 {
            let p = f64::from(count) / total;
            entropy -= p * p.log2();
        }
    }
    // Clamp away the tiny negative that rounding can leave on constant blocks.
    entropy.max(0.0)
}

/// Computes [`block_entropy`] at every pixel. Rows are processed in
/// parallel; each output value depends only on the read-only input.
pub fn entropy_map(img: &GrayImage, k: usize) -> Result<EntropyMap> {
    check_block_size(k)?;
    let (w, h) = img.dimensions();
    let mut raw = vec![0.0; w * h];
    raw.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, out) in row.iter_mut().enumerate() {
            *out = block_entropy_unchecked(img, x, y, k);
        }
    });
    Ok(EntropyMap {
        width: w,
        height: h,
        raw,
        block_size: k,
    })
}

/// Min-max normalization to bytes: the affine map sending the smallest
/// raw value to 0 and the largest to 255, rounding half up. A constant
/// map quantizes to all zeros.
pub fn quantize_entropy(map: &EntropyMap) -> QuantizedEntropyMap {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in &map.raw {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let levels = if hi > lo {
        let scale = 255.0 / (hi - lo);
        map.raw
            .iter()
            .map(|&v| ((v - lo) * scale).round() as u8)
            .collect()
    } else {
        vec![0u8; map.raw.len()]
    };
    QuantizedEntropyMap {
        width: map.width,
        height: map.height,
        levels,
        normalization: (lo, hi),
    }
}

/// Fixed-scale normalization against the theoretical maximum
/// `log2(k^2)`, so levels are comparable across images.
pub fn quantize_entropy_fixed(map: &EntropyMap) -> QuantizedEntropyMap {
    let hi = map.max_possible();
    let scale = 255.0 / hi;
    let levels = map.raw.iter().map(|&v| (v * scale).round() as u8).collect();
    QuantizedEntropyMap {
        width: map.width,
        height: map.height,
        levels,
        normalization: (0.0, hi),
    }
}

/// Dispatches on the requested normalization.
pub fn quantize_entropy_with(map: &EntropyMap, norm: EntropyNorm) -> QuantizedEntropyMap {
    match norm {
        EntropyNorm::MinMax => quantize_entropy(map),
        EntropyNorm::Fixed => quantize_entropy_fixed(map),
    }
}
