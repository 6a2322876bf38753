//! Grayscale and RGB image containers plus the pixel-level conversions
//! shared by the rest of the crate.
//!
//! Intensities are kept as `f64` in the nominal range `[0, 1]` everywhere
//! inside the library; quantization to 8 bits happens only at I/O
//! boundaries (see [`crate::io`]).

use crate::error::{Error, Result};

/// A rectangular grayscale image with row-major `f64` intensities.
///
/// Invariants enforced at construction: `width >= 1`, `height >= 1`,
/// `data.len() == width * height`, and every intensity is finite.
/// Instances are immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::InvalidParameter(format!(
                "data length {} does not match {width}x{height}",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite intensity {bad}"
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub fn constant(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
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
    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Intensity at column `x`, row `y`.
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        debug_assert!(x < self.width && y < self.height);
        self.data[y * self.width + x]
    }

    pub fn min_max(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in &self.data {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }
}

/// An 8-bit RGB image, row-major interleaved `[r, g, b, r, g, b, ...]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if data.len() != 3 * width * height {
            return Err(Error::InvalidParameter(format!(
                "data length {} does not match 3x{width}x{height}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
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
    pub fn data(&self) -> &[u8] {
        &self.data
    }
}

/// Quantizes an intensity to 8 bits: clamp to `[0, 1]`, scale by 255 and
/// round half up. This is the single rounding rule used at every I/O and
/// histogram boundary.
#[inline]
pub fn quantize_u8(v: f64) -> u8 {
    (255.0 * v.clamp(0.0, 1.0)).round() as u8
}

/// Converts per-channel `[0, 1]` intensities to luma with Rec. 601 weights
/// (0.299, 0.587, 0.114).
///
/// The weighted sum is evaluated as `r - 0.587*(r - g) - 0.114*(r - b)`,
/// which is algebraically identical and returns `r` bit-for-bit on gray
/// triples `(v, v, v)`.
pub fn to_grayscale(
    width: usize,
    height: usize,
    r: &[f64],
    g: &[f64],
    b: &[f64],
) -> Result<GrayImage> {
    let n = width * height;
    if r.len() != n || g.len() != n || b.len() != n {
        return Err(Error::InvalidParameter(format!(
            "channel lengths {}/{}/{} do not match {width}x{height}",
            r.len(),
            g.len(),
            b.len()
        )));
    }
    let data = r
        .iter()
        .zip(g)
        .zip(b)
        .map(|((&r, &g), &b)| r - 0.587 * (r - g) - 0.114 * (r - b))
        .collect();
    GrayImage::new(width, height, data)
}

/// Renders one byte per pixel through the jet colormap.
///
/// With `t = value / 255` the channels are the piecewise-linear ramps
/// `r = clamp(1.5 - |4t - 3|)`, `g = clamp(1.5 - |4t - 2|)`,
/// `b = clamp(1.5 - |4t - 1|)`, each scaled to 8 bits.
pub fn jet_colormap(width: usize, height: usize, values: &[u8]) -> Result<RgbImage> {
    if values.len() != width * height {
        return Err(Error::InvalidParameter(format!(
            "value count {} does not match {width}x{height}",
            values.len()
        )));
    }
    let mut data = Vec::with_capacity(3 * values.len());
    for &v in values {
        let t = f64::from(v) / 255.0;
        for anchor in [3.0, 2.0, 1.0] {
            let c = (1.5 - (4.0 * t - anchor).abs()).clamp(0.0, 1.0);
            data.push((255.0 * c).round() as u8);
        }
    }
    RgbImage::new(width, height, data)
}
