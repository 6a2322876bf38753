//! Image file I/O: a small PGM (P2/P5) codec and 8-bit PNG support.
//!
//! Reading sniffs the format from magic bytes, writing dispatches on the
//! file extension (`.pgm` or `.png`). Samples are mapped to `[0, 1]` by
//! dividing by the file's maxval on read and quantized with
//! [`quantize_u8`](crate::image::quantize_u8) on write.

use std::fs;
use std::path::Path;

use image::codecs::png::PngEncoder;
use image::{ColorType, ImageEncoder};

use crate::error::{Error, Result};
use crate::image::{quantize_u8, to_grayscale, GrayImage, RgbImage};

/// Loads a PGM (P2 or P5) or PNG file as a grayscale image.
///
/// 8-bit samples are divided by 255, 16-bit samples by 65535; RGB PNG
/// input is converted with [`to_grayscale`].
pub fn load_image(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })?;
    match bytes.first() {
        Some(b'P') => decode_pgm(&bytes),
        Some(0x89) if bytes.starts_with(&[0x89, b'P', b'N', b'G']) => decode_png(&bytes),
        _ => Err(Error::Format(
            "not a PGM (P2/P5) or PNG file".to_string(),
        )),
    }
}

/// Saves a grayscale image as 8-bit PGM (P5) or PNG depending on the
/// extension. Intensities are clamped to `[0, 1]` and rounded half up.
pub fn save_gray(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let samples: Vec<u8> = img.data().iter().map(|&v| quantize_u8(v)).collect();
    match extension(path)? {
        Format::Pgm => {
            let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
            out.extend_from_slice(&samples);
            write_bytes(path, &out)
        }
        Format::Png => encode_png(path, &samples, img.width(), img.height(), ColorType::L8),
    }
}

/// Saves an RGB image; PNG is the useful target, PGM is rejected.
pub fn save_rgb(img: &RgbImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    match extension(path)? {
        Format::Png => encode_png(path, img.data(), img.width(), img.height(), ColorType::Rgb8),
        Format::Pgm => Err(Error::Format(
            "RGB data cannot be written as PGM".to_string(),
        )),
    }
}

/// Writes raw 16-bit samples as a binary PGM with maxval 65535
/// (big-endian sample bytes).
pub fn save_pgm_u16(
    width: usize,
    height: usize,
    samples: &[u16],
    path: impl AsRef<Path>,
) -> Result<()> {
    if samples.len() != width * height {
        return Err(Error::InvalidParameter(format!(
            "sample count {} does not match {width}x{height}",
            samples.len()
        )));
    }
    let path = path.as_ref();
    let mut out = format!("P5\n{width} {height}\n65535\n").into_bytes();
    for &s in samples {
        out.extend_from_slice(&s.to_be_bytes());
    }
    write_bytes(path, &out)
}

enum Format {
    Pgm,
    Png,
}

fn extension(path: &Path) -> Result<Format> {
    match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("pgm") => Ok(Format::Pgm),
        Some(e) if e.eq_ignore_ascii_case("png") => Ok(Format::Png),
        other => Err(Error::Format(format!(
            "unsupported output extension {other:?} (expected .pgm or .png)"
        ))),
    }
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| Error::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn corrupt(what: &str) -> Error {
    Error::Format(what.to_string())
}

/// Pulls the next whitespace-separated token, skipping `#` comments.
fn next_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Option<&'a [u8]> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    if *pos >= bytes.len() {
        return None;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    Some(&bytes[start..*pos])
}

fn parse_number(token: &[u8]) -> Option<u32> {
    std::str::from_utf8(token).ok()?.parse().ok()
}

fn header_field(bytes: &[u8], pos: &mut usize, what: &str) -> Result<u32> {
    next_token(bytes, pos)
        .and_then(parse_number)
        .ok_or_else(|| corrupt(&format!("PGM header missing {what}")))
}

fn decode_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let ascii = match bytes.get(..2) {
        Some(b"P2") => true,
        Some(b"P5") => false,
        _ => return Err(corrupt("unknown PNM magic (only P2/P5 supported)")),
    };
    let mut pos = 2;
    let width = header_field(bytes, &mut pos, "width")? as usize;
    let height = header_field(bytes, &mut pos, "height")? as usize;
    let maxval = header_field(bytes, &mut pos, "maxval")?;
    if width == 0 || height == 0 {
        return Err(corrupt("zero image dimension"));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(corrupt("PGM maxval out of range"));
    }
    let n = width * height;
    let scale = f64::from(maxval);

    let mut data = Vec::with_capacity(n);
    if ascii {
        for _ in 0..n {
            let sample = header_field(bytes, &mut pos, "sample")?;
            if sample > maxval {
                return Err(corrupt("sample exceeds maxval"));
            }
            data.push(f64::from(sample) / scale);
        }
    } else {
        // Exactly one whitespace byte separates the maxval from the raster.
        if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
            return Err(corrupt("missing separator before P5 raster"));
        }
        pos += 1;
        let wide = maxval > 255;
        let needed = n * if wide { 2 } else { 1 };
        let raster = bytes
            .get(pos..pos + needed)
            .ok_or_else(|| corrupt("truncated P5 raster"))?;
        if wide {
            for pair in raster.chunks_exact(2) {
                let sample = u16::from_be_bytes([pair[0], pair[1]]);
                if u32::from(sample) > maxval {
                    return Err(corrupt("sample exceeds maxval"));
                }
                data.push(f64::from(sample) / scale);
            }
        } else {
            for &b in raster {
                if u32::from(b) > maxval {
                    return Err(corrupt("sample exceeds maxval"));
                }
                data.push(f64::from(b) / scale);
            }
        }
    }
    GrayImage::new(width, height, data)
}

fn decode_png(bytes: &[u8]) -> Result<GrayImage> {
    let decoded = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
        .map_err(|e| corrupt(&format!("PNG decode failed: {e}")))?;
    let width = decoded.width() as usize;
    let height = decoded.height() as usize;
    if width == 0 || height == 0 {
        return Err(corrupt("zero image dimension"));
    }
    match decoded {
        image::DynamicImage::ImageLuma8(img) => {
            let data = img.into_raw().iter().map(|&v| f64::from(v) / 255.0).collect();
            GrayImage::new(width, height, data)
        }
        image::DynamicImage::ImageRgb8(img) => {
            let raw = img.into_raw();
            let mut r = Vec::with_capacity(width * height);
            let mut g = Vec::with_capacity(width * height);
            let mut b = Vec::with_capacity(width * height);
            for px in raw.chunks_exact(3) {
                r.push(f64::from(px[0]) / 255.0);
                g.push(f64::from(px[1]) / 255.0);
                b.push(f64::from(px[2]) / 255.0);
            }
            to_grayscale(width, height, &r, &g, &b)
        }
        other => Err(corrupt(&format!(
            "unsupported PNG color type {:?} (expected 8-bit gray or RGB)",
            other.color()
        ))),
    }
}

fn encode_png(path: &Path, samples: &[u8], width: usize, height: usize, color: ColorType) -> Result<()> {
    let mut out = Vec::new();
    PngEncoder::new(&mut out)
        .write_image(samples, width as u32, height as u32, color.into())
        .map_err(|e| Error::Format(format!("PNG encode failed: {e}")))?;
    write_bytes(path, &out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn p2_samples_scale_by_255() {
        let img = decode_pgm(b"P2\n2 2\n255\n0 255\n128 64\n").unwrap();
        assert_eq!(img.dimensions(), (2, 2));
        assert_eq!(img.data(), &[0.0, 1.0, 128.0 / 255.0, 64.0 / 255.0]);
    }

    #[test]
    fn comments_after_magic_are_tolerated() {
        let img = decode_pgm(b"P2\n# a comment\n2 1 # trailing\n# another\n255\n7 9\n").unwrap();
        assert_eq!(img.data(), &[7.0 / 255.0, 9.0 / 255.0]);
    }

    #[test]
    fn p5_binary_round() {
        let mut bytes = b"P5\n2 1\n255\n".to_vec();
        bytes.extend_from_slice(&[0, 255]);
        let img = decode_pgm(&bytes).unwrap();
        assert_eq!(img.data(), &[0.0, 1.0]);
    }

    #[test]
    fn p5_sixteen_bit_scales_by_65535() {
        let mut bytes = b"P5\n2 1\n65535\n".to_vec();
        bytes.extend_from_slice(&65535u16.to_be_bytes());
        bytes.extend_from_slice(&32768u16.to_be_bytes());
        let img = decode_pgm(&bytes).unwrap();
        assert_eq!(img.data()[0], 1.0);
        assert_eq!(img.data()[1], 32768.0 / 65535.0);
    }

    #[test]
    fn truncated_header_is_an_error() {
        let err = decode_pgm(b"P2\n2").unwrap_err();
        assert!(err.to_string().contains("unsupported or corrupt format"));
    }

    #[test]
    fn truncated_raster_is_an_error() {
        let err = decode_pgm(b"P5\n2 2\n255\nab").unwrap_err();
        assert!(err.to_string().contains("unsupported or corrupt format"));
    }

    #[test]
    fn zero_dimension_is_an_error() {
        assert!(decode_pgm(b"P2\n0 2\n255\n").is_err());
    }

    #[test]
    fn pgm_write_quantization() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("g.pgm");
        let img = GrayImage::new(4, 1, vec![0.0, 1.0, 0.5, 1.2]).unwrap();
        save_gray(&img, &path).unwrap();
        let bytes = fs::read(&path).unwrap();
        assert_eq!(&bytes[bytes.len() - 4..], &[0, 255, 128, 255]);
    }

    #[test]
    fn png_gray_round_trip_one_pixel() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("w.png");
        let img = GrayImage::new(1, 1, vec![1.0]).unwrap();
        save_gray(&img, &path).unwrap();
        let back = load_image(&path).unwrap();
        assert_eq!(back.data(), &[1.0]);
    }

    #[test]
    fn png_rgb_loads_as_luma() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("c.png");
        let rgb = RgbImage::new(1, 1, vec![255, 0, 0]).unwrap();
        save_rgb(&rgb, &path).unwrap();
        let img = load_image(&path).unwrap();
        assert!((img.get(0, 0) - 0.299).abs() < 1e-12);
    }

    #[test]
    fn sixteen_bit_pgm_write_reads_back() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("raw.pgm");
        save_pgm_u16(2, 1, &[0, 65535], &path).unwrap();
        let img = load_image(&path).unwrap();
        assert_eq!(img.data(), &[0.0, 1.0]);
    }

    #[test]
    fn missing_file_is_a_read_error() {
        let err = load_image("/nonexistent/nope.pgm").unwrap_err();
        assert!(matches!(err, Error::Read { .. }));
    }

    #[test]
    fn gray_round_trip_error_within_one_level() {
        let dir = tempdir().unwrap();
        for (i, ext) in ["pgm", "png"].iter().enumerate() {
            let path = dir.path().join(format!("rt{i}.{ext}"));
            let img = GrayImage::from_fn(17, 5, |x, y| {
                ((x * 31 + y * 7) as f64 * 0.137).fract()
            })
            .unwrap();
            save_gray(&img, &path).unwrap();
            let back = load_image(&path).unwrap();
            for (a, b) in img.data().iter().zip(back.data()) {
                assert!((a - b).abs() <= 1.0 / 255.0, "{a} vs {b}");
            }
        }
    }
}
