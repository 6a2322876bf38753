//! Cartoon-texture decomposition of grayscale images.
//!
//! The pipeline splits an image `f` into a cartoon component `u` and a
//! texture residual `v = f - u` in three steps:
//!
//! 1. ROF total-variation filtering of `f` at a ladder of decreasing
//!    fidelity weights (module [`solver`], ladder in [`decompose`]);
//! 2. a per-pixel local block-entropy map of `f` quantized to bytes
//!    (module [`entropy`]);
//! 3. per-pixel selection: each output pixel is copied from the ladder
//!    scale its entropy level points at, so low-entropy (flat) pixels
//!    keep the original value and high-entropy (textured) pixels come
//!    from strongly smoothed scales (module [`decompose`]).
//!
//! [`image`] and [`io`] provide the `f64` image containers, PGM/PNG
//! codecs, grayscale conversion and a jet colormap for visualizing
//! entropy maps.

pub mod decompose;
pub mod entropy;
pub mod error;
pub mod image;
pub mod io;
pub mod solver;

pub use crate::decompose::{
    bin_assign, build_ladder, build_ladder_with_reports, compose_cartoon, decompose,
    lambda_ladder, Decomposition, ScaleLadder,
};
pub use crate::entropy::{
    block_entropy, entropy_map, quantize_entropy, quantize_entropy_fixed, quantize_entropy_with,
    EntropyMap, EntropyNorm, QuantizedEntropyMap,
};
pub use crate::error::{Error, Result};
pub use crate::image::{jet_colormap, quantize_u8, to_grayscale, GrayImage, RgbImage};
pub use crate::io::{load_image, save_gray, save_pgm_u16, save_rgb};
pub use crate::solver::{
    rof_descent, rof_dual, rof_filter, total_variation, tv_energy, SolveReport, SolverConfig,
    SolverMethod,
};
