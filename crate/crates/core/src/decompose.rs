//! Multi-scale cartoon-texture decomposition.
//!
//! A ladder of ROF-filtered images at strictly decreasing fidelity weights
//! is built from the input (scale 0 is the input itself), the input's
//! block-entropy map is quantized to bytes, and every output pixel is
//! copied verbatim from the ladder scale its entropy level selects. The
//! texture component is the exact per-pixel residual.

use rayon::prelude::*;

use crate::entropy::{entropy_map, quantize_entropy, QuantizedEntropyMap};
use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::solver::{rof_filter, SolveReport, SolverConfig};

/// The input image together with its ROF-filtered versions.
///
/// `images()[0]` is the original; `images()[i]` for `i >= 1` was solved at
/// `lambdas()[i - 1]`, and the lambdas decrease strictly, so higher scale
/// indices are smoother.
#[derive(Debug, Clone)]
pub struct ScaleLadder {
    lambdas: Vec<f64>,
    images: Vec<GrayImage>,
}

impl ScaleLadder {
    /// Number of filtered scales (excluding the original at index 0).
    #[inline]
    pub fn n_scales(&self) -> usize {
        self.lambdas.len()
    }

    #[inline]
    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    #[inline]
    pub fn images(&self) -> &[GrayImage] {
        &self.images
    }

    #[inline]
    pub fn original(&self) -> &GrayImage {
        &self.images[0]
    }

    #[inline]
    pub fn dimensions(&self) -> (usize, usize) {
        self.images[0].dimensions()
    }
}

/// A cartoon-texture split. `texture` holds the signed residual
/// `f - cartoon` and `scale_index_map` records, per pixel, which ladder
/// scale the cartoon pixel was copied from.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub cartoon: GrayImage,
    pub texture: GrayImage,
    pub scale_index_map: Vec<usize>,
}

/// Generates `count` lambdas `start + i * step` and orders them for
/// ladder use: strictly decreasing, so the largest lambda is scale 1.
pub fn lambda_ladder(start: f64, step: f64, count: usize) -> Result<Vec<f64>> {
    if !(start > 0.0 && start.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "lambda start must be positive, got {start}"
        )));
    }
    if !(step >= 0.0 && step.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "lambda step must be non-negative, got {step}"
        )));
    }
    if count == 0 {
        return Err(Error::InvalidParameter(
            "ladder count must be at least 1".to_string(),
        ));
    }
    if step == 0.0 && count > 1 {
        return Err(Error::InvalidParameter(
            "zero lambda step duplicates ladder values".to_string(),
        ));
    }
    Ok((0..count)
        .rev()
        .map(|i| start + i as f64 * step)
        .collect())
}

fn check_ladder_lambdas(lambdas: &[f64]) -> Result<()> {
    for pair in lambdas.windows(2) {
        if !(pair[1] < pair[0]) {
            return Err(Error::InvalidParameter(format!(
                "ladder lambdas must be strictly decreasing, got {} then {}",
                pair[0], pair[1]
            )));
        }
    }
    if let Some(&last) = lambdas.last() {
        if !(last > 0.0 && last.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "ladder lambdas must be positive, got {last}"
            )));
        }
    }
    Ok(())
}

/// Builds the scale ladder: one independent ROF solve per lambda, each
/// starting from `f`. Solves run in parallel; every output depends only
/// on `f`, its lambda and the config, so the result is deterministic.
pub fn build_ladder(f: &GrayImage, lambdas: &[f64], config: &SolverConfig) -> Result<ScaleLadder> {
    build_ladder_with_reports(f, lambdas, config).map(|(ladder, _)| ladder)
}

/// [`build_ladder`] variant that also returns per-scale solver reports
/// (index 0 corresponds to scale 1).
pub fn build_ladder_with_reports(
    f: &GrayImage,
    lambdas: &[f64],
    config: &SolverConfig,
) -> Result<(ScaleLadder, Vec<SolveReport>)> {
    check_ladder_lambdas(lambdas)?;
    config.validate()?;
    let solved: Vec<(GrayImage, SolveReport)> = lambdas
        .par_iter()
        .map(|&lambda| {
            rof_filter(f, lambda, config).map_err(|e| Error::Ladder {
                lambda,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;

    let mut images = Vec::with_capacity(lambdas.len() + 1);
    images.push(f.clone());
    let mut reports = Vec::with_capacity(lambdas.len());
    for (img, report) in solved {
        images.push(img);
        reports.push(report);
    }
    Ok((
        ScaleLadder {
            lambdas: lambdas.to_vec(),
            images,
        },
        reports,
    ))
}

/// Maps a quantized entropy level to a ladder scale index:
/// `min(n_scales, floor(level * (n_scales + 1) / 256))`.
///
/// Monotone in `level`, with 0 pinned to scale 0 (the original) and 255
/// pinned to `n_scales` (the smoothest image).
#[inline]
pub fn bin_assign(level: u8, n_scales: usize) -> usize {
    (usize::from(level) * (n_scales + 1) / 256).min(n_scales)
}

/// Assembles the cartoon by copying, for every pixel, the value at the
/// same location from the ladder scale selected by the pixel's entropy
/// level. No blending: each output pixel is bitwise one of the ladder's.
pub fn compose_cartoon(
    ladder: &ScaleLadder,
    qmap: &QuantizedEntropyMap,
) -> Result<Decomposition> {
    let (w, h) = ladder.dimensions();
    if (qmap.width(), qmap.height()) != (w, h) {
        return Err(Error::DimensionMismatch {
            expected_width: w,
            expected_height: h,
            width: qmap.width(),
            height: qmap.height(),
        });
    }
    let n = ladder.n_scales();
    let f = ladder.original().data();
    let levels = qmap.levels();

    let mut cartoon = Vec::with_capacity(w * h);
    let mut texture = Vec::with_capacity(w * h);
    let mut scale_index_map = Vec::with_capacity(w * h);
    for i in 0..w * h {
        let s = bin_assign(levels[i], n);
        let c = ladder.images()[s].data()[i];
        cartoon.push(c);
        texture.push(f[i] - c);
        scale_index_map.push(s);
    }
    Ok(Decomposition {
        cartoon: GrayImage::new(w, h, cartoon)?,
        texture: GrayImage::new(w, h, texture)?,
        scale_index_map,
    })
}

/// End-to-end decomposition: build the ladder at the given lambdas,
/// compute the block-entropy map of the *original* image, min-max
/// quantize it and compose. Equivalent to calling the pieces directly.
pub fn decompose(
    f: &GrayImage,
    lambdas: &[f64],
    block_size: usize,
    config: &SolverConfig,
) -> Result<Decomposition> {
    let ladder = build_ladder(f, lambdas, config)?;
    let qmap = quantize_entropy(&entropy_map(f, block_size)?);
    compose_cartoon(&ladder, &qmap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::total_variation;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_image(w: usize, h: usize, seed: u64) -> GrayImage {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        GrayImage::from_fn(w, h, |_, _| rng.gen_range(0.0..1.0)).unwrap()
    }

    fn qmap_from_levels(w: usize, h: usize, levels: Vec<u8>) -> QuantizedEntropyMap {
        QuantizedEntropyMap::new(w, h, levels, (0.0, 255.0)).unwrap()
    }

    #[test]
    fn ladder_values_match_figure_set() {
        let l = lambda_ladder(0.005, 0.020, 3).unwrap();
        assert_eq!(l, vec![0.045, 0.025, 0.005]);
    }

    #[test]
    fn ladder_single_value() {
        assert_eq!(lambda_ladder(0.025, 0.9, 1).unwrap(), vec![0.025]);
        assert_eq!(lambda_ladder(0.025, 0.0, 1).unwrap(), vec![0.025]);
    }

    #[test]
    fn ladder_full_run_count_and_range() {
        let l = lambda_ladder(0.005, 0.002, 74).unwrap();
        assert_eq!(l.len(), 74);
        assert!((l[0] - 0.151).abs() < 1e-12);
        assert!((l[73] - 0.005).abs() < 1e-15);
        for w in l.windows(2) {
            assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn ladder_rejects_bad_parameters() {
        assert!(lambda_ladder(0.0, 0.1, 3).is_err());
        assert!(lambda_ladder(-0.1, 0.1, 3).is_err());
        assert!(lambda_ladder(0.1, -0.1, 3).is_err());
        assert!(lambda_ladder(0.1, 0.1, 0).is_err());
        assert!(lambda_ladder(0.1, 0.0, 2).is_err(), "duplicate values");
    }

    #[test]
    fn bin_assign_anchors_and_midpoint() {
        assert_eq!(bin_assign(0, 5), 0);
        assert_eq!(bin_assign(255, 5), 5);
        assert_eq!(bin_assign(128, 5), 3);
        assert_eq!(bin_assign(0, 0), 0);
        assert_eq!(bin_assign(255, 0), 0);
    }

    #[test]
    fn bin_assign_monotone_for_paper_scale_counts() {
        for n in [1usize, 3, 5, 11, 74] {
            let mut prev = 0;
            for level in 0..=255u8 {
                let s = bin_assign(level, n);
                assert!(s >= prev, "n={n} level={level}");
                assert!(s <= n);
                prev = s;
            }
            assert_eq!(bin_assign(0, n), 0);
            assert_eq!(bin_assign(255, n), n);
        }
    }

    #[test]
    fn constant_image_ladder_is_all_copies() {
        let f = GrayImage::constant(6, 4, 0.5).unwrap();
        let ladder = build_ladder(&f, &[0.1, 0.01], &SolverConfig::default()).unwrap();
        for img in ladder.images() {
            assert_eq!(img.data(), f.data());
        }
    }

    #[test]
    fn empty_lambda_list_gives_degenerate_ladder() {
        let f = random_image(4, 4, 1);
        let ladder = build_ladder(&f, &[], &SolverConfig::default()).unwrap();
        assert_eq!(ladder.n_scales(), 0);
        assert_eq!(ladder.images().len(), 1);
        assert_eq!(ladder.original().data(), f.data());
    }

    #[test]
    fn non_decreasing_lambdas_are_rejected() {
        let f = random_image(4, 4, 2);
        assert!(build_ladder(&f, &[0.01, 0.1], &SolverConfig::default()).is_err());
        assert!(build_ladder(&f, &[0.1, 0.1], &SolverConfig::default()).is_err());
        assert!(build_ladder(&f, &[0.1, -0.5], &SolverConfig::default()).is_err());
    }

    #[test]
    fn ladder_tv_is_non_increasing_in_scale() {
        let f = random_image(32, 32, 3);
        let lambdas = lambda_ladder(0.01, 0.03, 5).unwrap();
        let ladder = build_ladder(&f, &lambdas, &SolverConfig::default()).unwrap();
        let tvs: Vec<f64> = ladder.images().iter().map(total_variation).collect();
        for w in tvs.windows(2) {
            assert!(w[1] <= w[0] + 1e-6, "TV rose along ladder: {tvs:?}");
        }
    }

    #[test]
    fn zero_qmap_returns_original() {
        let f = random_image(5, 5, 4);
        let ladder = build_ladder(&f, &[0.05], &SolverConfig::default()).unwrap();
        let q = qmap_from_levels(5, 5, vec![0; 25]);
        let d = compose_cartoon(&ladder, &q).unwrap();
        assert_eq!(d.cartoon.data(), f.data());
        assert!(d.texture.data().iter().all(|&v| v == 0.0));
        assert!(d.scale_index_map.iter().all(|&s| s == 0));
    }

    #[test]
    fn full_qmap_returns_smoothest_scale() {
        let f = random_image(5, 5, 5);
        let lambdas = lambda_ladder(0.005, 0.03, 5).unwrap();
        let ladder = build_ladder(&f, &lambdas, &SolverConfig::default()).unwrap();
        let q = qmap_from_levels(5, 5, vec![255; 25]);
        let d = compose_cartoon(&ladder, &q).unwrap();
        assert_eq!(d.cartoon.data(), ladder.images()[5].data());
        assert!(d.scale_index_map.iter().all(|&s| s == 5));
    }

    #[test]
    fn checkerboard_qmap_alternates_sources() {
        let f = random_image(4, 4, 6);
        let ladder = build_ladder(&f, &[0.05], &SolverConfig::default()).unwrap();
        let levels: Vec<u8> = (0..16).map(|i| if i % 2 == 0 { 0 } else { 255 }).collect();
        let q = qmap_from_levels(4, 4, levels);
        let d = compose_cartoon(&ladder, &q).unwrap();
        for i in 0..16 {
            let expect = if i % 2 == 0 {
                f.data()[i]
            } else {
                ladder.images()[1].data()[i]
            };
            assert_eq!(d.cartoon.data()[i], expect);
            if i % 2 == 0 {
                assert_eq!(d.texture.data()[i], 0.0);
            }
        }
    }

    #[test]
    fn compose_rejects_mismatched_qmap() {
        let f = random_image(4, 4, 7);
        let ladder = build_ladder(&f, &[0.05], &SolverConfig::default()).unwrap();
        let q = qmap_from_levels(3, 4, vec![0; 12]);
        assert!(compose_cartoon(&ladder, &q).is_err());
    }

    #[test]
    fn texture_is_the_exact_residual() {
        let f = random_image(8, 8, 8);
        let lambdas = lambda_ladder(0.01, 0.05, 3).unwrap();
        let d = decompose(&f, &lambdas, 3, &SolverConfig::default()).unwrap();
        for i in 0..64 {
            let expected = f.data()[i] - d.cartoon.data()[i];
            assert_eq!(d.texture.data()[i].to_bits(), expected.to_bits());
        }
    }

    #[test]
    fn cartoon_pixels_come_from_their_recorded_scale() {
        let f = random_image(8, 8, 9);
        let lambdas = lambda_ladder(0.01, 0.05, 3).unwrap();
        let ladder = build_ladder(&f, &lambdas, &SolverConfig::default()).unwrap();
        let qmap = quantize_entropy(&entropy_map(&f, 3).unwrap());
        let d = compose_cartoon(&ladder, &qmap).unwrap();
        for i in 0..64 {
            let s = d.scale_index_map[i];
            assert!(s <= ladder.n_scales());
            assert_eq!(
                d.cartoon.data()[i].to_bits(),
                ladder.images()[s].data()[i].to_bits()
            );
        }
    }

    #[test]
    fn constant_input_decomposes_to_itself() {
        let f = GrayImage::constant(9, 9, 0.77).unwrap();
        let lambdas = lambda_ladder(0.01, 0.05, 2).unwrap();
        let d = decompose(&f, &lambdas, 3, &SolverConfig::default()).unwrap();
        assert_eq!(d.cartoon.data(), f.data());
        assert!(d.texture.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn degenerate_ladder_returns_input_regardless_of_entropy() {
        let f = random_image(10, 10, 10);
        let d = decompose(&f, &[], 3, &SolverConfig::default()).unwrap();
        assert_eq!(d.cartoon.data(), f.data());
        assert!(d.texture.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn decompose_is_deterministic() {
        let f = random_image(12, 12, 11);
        let lambdas = lambda_ladder(0.02, 0.04, 3).unwrap();
        let a = decompose(&f, &lambdas, 3, &SolverConfig::default()).unwrap();
        let b = decompose(&f, &lambdas, 3, &SolverConfig::default()).unwrap();
        assert_eq!(a.cartoon.data(), b.cartoon.data());
        assert_eq!(a.texture.data(), b.texture.data());
        assert_eq!(a.scale_index_map, b.scale_index_map);
    }
}
