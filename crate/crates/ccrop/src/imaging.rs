//! Raster image representation, P6 PPM I/O, crop extraction, box resampling
//! and horizontal flip.
//!
//! P6 PPM (binary, maxval 255) is the one guaranteed codec: zero-dependency
//! and bit-exact. Pixels live in memory as row-major interleaved RGB scalars
//! in `[0, 1]`, converted from 8-bit at load time.

use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::geometry::{denormalize, CropRegion, ImageDims};

/// Channels per pixel (RGB).
pub const CHANNELS: usize = 3;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("ppm parse error at byte {offset}: {reason}")]
    Parse { offset: usize, reason: String },
}

impl ImageError {
    fn parse(offset: usize, reason: impl Into<String>) -> Self {
        ImageError::Parse {
            offset,
            reason: reason.into(),
        }
    }
}

/// RGB raster image; immutable after construction in practice (ops return
/// new images), so safe to share across concurrent readers.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: u32,
    height: u32,
    pixels: Vec<f32>,
}

impl Image {
    /// Builds an image from row-major interleaved RGB values in `[0, 1]`.
    pub fn from_pixels(width: u32, height: u32, pixels: Vec<f32>) -> Self {
        assert!(width >= 1 && height >= 1, "image dims must be positive");
        assert_eq!(
            pixels.len(),
            width as usize * height as usize * CHANNELS,
            "pixel count must be width*height*3"
        );
        Self {
            width,
            height,
            pixels,
        }
    }

    /// Constant-color image.
    pub fn filled(width: u32, height: u32, value: f32) -> Self {
        Self::from_pixels(
            width,
            height,
            vec![value; width as usize * height as usize * CHANNELS],
        )
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dims(&self) -> ImageDims {
        ImageDims::new(self.width, self.height)
    }

    pub fn pixels(&self) -> &[f32] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [f32] {
        &mut self.pixels
    }

    /// Value of channel `ch` at `(x, y)`.
    pub fn at(&self, x: u32, y: u32, ch: usize) -> f32 {
        debug_assert!(x < self.width && y < self.height && ch < CHANNELS);
        self.pixels[(y as usize * self.width as usize + x as usize) * CHANNELS + ch]
    }

    /// Mean over all pixel values, accumulated in double precision.
    pub fn mean(&self) -> f64 {
        let sum: f64 = self.pixels.iter().map(|&v| f64::from(v)).sum();
        sum / self.pixels.len() as f64
    }
}

fn quantize(v: f32) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0 + 0.5) as u8
}

struct PpmCursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> PpmCursor<'a> {
    fn skip_separators(&mut self) {
        while self.pos < self.data.len() {
            match self.data[self.pos] {
                b' ' | b'\t' | b'\n' | b'\r' | 0x0b | 0x0c => self.pos += 1,
                b'#' => {
                    while self.pos < self.data.len() && self.data[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
    }

    fn read_number(&mut self, what: &str) -> Result<u32, ImageError> {
        self.skip_separators();
        let start = self.pos;
        let mut value: u64 = 0;
        while self.pos < self.data.len() && self.data[self.pos].is_ascii_digit() {
            value = value * 10 + u64::from(self.data[self.pos] - b'0');
            if value > u64::from(u32::MAX) {
                return Err(ImageError::parse(start, format!("{what} out of range")));
            }
            self.pos += 1;
        }
        if self.pos == start {
            return Err(ImageError::parse(
                self.pos,
                format!("expected {what}, found non-digit"),
            ));
        }
        Ok(value as u32)
    }
}

/// Decodes a P6 binary PPM (maxval 255) from raw bytes.
pub fn decode_ppm(data: &[u8]) -> Result<Image, ImageError> {
    if data.len() < 2 || &data[0..2] != b"P6" {
        let found = data
            .get(0..2)
            .map(|m| String::from_utf8_lossy(m).into_owned())
            .unwrap_or_default();
        return Err(ImageError::parse(
            0,
            format!("unsupported magic {found:?}, only binary P6 is accepted"),
        ));
    }
    let mut cur = PpmCursor { data, pos: 2 };
    let width = cur.read_number("width")?;
    let height = cur.read_number("height")?;
    let maxval_at = {
        cur.skip_separators();
        cur.pos
    };
    let maxval = cur.read_number("maxval")?;
    if maxval != 255 {
        return Err(ImageError::parse(
            maxval_at,
            format!("unsupported maxval {maxval}, expected 255"),
        ));
    }
    if width == 0 || height == 0 {
        return Err(ImageError::parse(2, "zero image dimension"));
    }
    // Exactly one separator byte between header and payload.
    if cur.pos >= data.len() {
        return Err(ImageError::parse(cur.pos, "missing payload"));
    }
    cur.pos += 1;

    let expected = width as usize * height as usize * CHANNELS;
    let payload = &data[cur.pos..];
    if payload.len() < expected {
        return Err(ImageError::parse(
            data.len(),
            format!(
                "truncated payload: expected {expected} bytes, found {}",
                payload.len()
            ),
        ));
    }
    let pixels = payload[..expected]
        .iter()
        .map(|&b| f32::from(b) / 255.0)
        .collect();
    Ok(Image::from_pixels(width, height, pixels))
}

/// Encodes an image as a P6 binary PPM (maxval 255).
pub fn encode_ppm(img: &Image) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend(img.pixels.iter().map(|&v| quantize(v)));
    out
}

pub fn load_ppm(path: impl AsRef<Path>) -> Result<Image, ImageError> {
    let path = path.as_ref();
    let data = fs::read(path).map_err(|source| ImageError::Io {
        path: path.display().to_string(),
        source,
    })?;
    decode_ppm(&data)
}

pub fn save_ppm(img: &Image, path: impl AsRef<Path>) -> Result<(), ImageError> {
    let path = path.as_ref();
    fs::write(path, encode_ppm(img)).map_err(|source| ImageError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Copies the pixel window selected by a normalized crop region.
///
/// The window comes from [`denormalize`], which clamps into the image, so any
/// finite region yields a non-empty output.
pub fn crop_extract(img: &Image, c: &CropRegion) -> Image {
    let px = denormalize(c, img.dims());
    let (w, h) = (px.width() as usize, px.height() as usize);
    let src_w = img.width as usize;
    let mut pixels = Vec::with_capacity(w * h * CHANNELS);
    for y in 0..h {
        let row = (px.y1 as usize + y) * src_w + px.x1 as usize;
        pixels.extend_from_slice(&img.pixels[row * CHANNELS..(row + w) * CHANNELS]);
    }
    Image::from_pixels(px.width(), px.height(), pixels)
}

/// Downscales so the maximum side equals `cap`, aspect preserved (rounded);
/// identity when already within the cap. Area-average (box) resampling with
/// exact fractional pixel coverage, accumulated in double precision.
pub fn downscale_cap(img: &Image, cap: u32) -> Image {
    assert!(cap >= 32, "cap must be at least 32 pixels");
    let max_side = img.width.max(img.height);
    if max_side <= cap {
        return img.clone();
    }
    let scale = f64::from(cap) / f64::from(max_side);
    let new_w = ((f64::from(img.width) * scale).round() as u32).max(1);
    let new_h = ((f64::from(img.height) * scale).round() as u32).max(1);

    let (sw, sh) = (img.width as usize, img.height as usize);
    let (dw, dh) = (new_w as usize, new_h as usize);
    let mut pixels = vec![0f32; dw * dh * CHANNELS];
    for oy in 0..dh {
        let sy0 = oy as f64 * sh as f64 / dh as f64;
        let sy1 = (oy + 1) as f64 * sh as f64 / dh as f64;
        for ox in 0..dw {
            let sx0 = ox as f64 * sw as f64 / dw as f64;
            let sx1 = (ox + 1) as f64 * sw as f64 / dw as f64;
            let mut acc = [0f64; CHANNELS];
            for y in sy0.floor() as usize..(sy1.ceil() as usize).min(sh) {
                let wy = (sy1.min((y + 1) as f64) - sy0.max(y as f64)).max(0.0);
                if wy == 0.0 {
                    continue;
                }
                for x in sx0.floor() as usize..(sx1.ceil() as usize).min(sw) {
                    let wx = (sx1.min((x + 1) as f64) - sx0.max(x as f64)).max(0.0);
                    let base = (y * sw + x) * CHANNELS;
                    let w = wy * wx;
                    for (ch, a) in acc.iter_mut().enumerate() {
                        *a += w * f64::from(img.pixels[base + ch]);
                    }
                }
            }
            let area = (sy1 - sy0) * (sx1 - sx0);
            let base = (oy * dw + ox) * CHANNELS;
            for (ch, a) in acc.iter().enumerate() {
                pixels[base + ch] = (a / area) as f32;
            }
        }
    }
    Image::from_pixels(new_w, new_h, pixels)
}

/// Reverses the columns of every row.
pub fn hflip(img: &Image) -> Image {
    let (w, h) = (img.width as usize, img.height as usize);
    let mut pixels = vec![0f32; w * h * CHANNELS];
    for y in 0..h {
        for x in 0..w {
            let src = (y * w + x) * CHANNELS;
            let dst = (y * w + (w - 1 - x)) * CHANNELS;
            pixels[dst..dst + CHANNELS].copy_from_slice(&img.pixels[src..src + CHANNELS]);
        }
    }
    Image::from_pixels(img.width, img.height, pixels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::normalize;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_image(seed: u64, w: u32, h: u32) -> Image {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pixels = (0..w as usize * h as usize * CHANNELS)
            .map(|_| rng.gen::<f32>())
            .collect();
        Image::from_pixels(w, h, pixels)
    }

    #[test]
    fn ppm_round_trip_is_bit_exact() {
        let img = random_image(7, 13, 9);
        let bytes = encode_ppm(&img);
        let back = decode_ppm(&bytes).unwrap();
        assert_eq!(encode_ppm(&back), bytes);
    }

    #[test]
    fn ppm_minimal_white_pixel() {
        let img = decode_ppm(b"P6\n1 1\n255\n\xff\xff\xff").unwrap();
        assert_eq!((img.width(), img.height()), (1, 1));
        assert_eq!(img.pixels(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn ppm_rejects_ascii_variant() {
        let err = decode_ppm(b"P3\n1 1\n255\n255 255 255\n").unwrap_err();
        match err {
            ImageError::Parse { offset, reason } => {
                assert_eq!(offset, 0);
                assert!(reason.contains("P3"), "{reason}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn ppm_reports_truncation_and_bad_maxval() {
        let err = decode_ppm(b"P6\n2 2\n255\n\x00\x01").unwrap_err();
        assert!(matches!(err, ImageError::Parse { .. }));
        assert!(err.to_string().contains("truncated"));

        let err = decode_ppm(b"P6\n1 1\n65535\n\x00\x00\x00\x00\x00\x00").unwrap_err();
        assert!(err.to_string().contains("maxval"));
    }

    #[test]
    fn ppm_header_allows_comments() {
        let img = decode_ppm(b"P6\n# a comment\n2 1 # inline\n255\nabcdef").unwrap();
        assert_eq!((img.width(), img.height()), (2, 1));
    }

    #[test]
    fn crop_full_frame_is_identity() {
        let img = random_image(1, 20, 12);
        let full = CropRegion::full_frame(img.dims());
        assert_eq!(crop_extract(&img, &full), img);
    }

    #[test]
    fn crop_left_half_matches_index_copy() {
        let img = random_image(2, 4, 4);
        let c = normalize([0.0, 0.0, 2.0, 4.0], img.dims()).unwrap();
        let out = crop_extract(&img, &c);
        assert_eq!((out.width(), out.height()), (2, 4));
        for y in 0..4 {
            for x in 0..2 {
                for ch in 0..CHANNELS {
                    assert_eq!(out.at(x, y, ch), img.at(x, y, ch));
                }
            }
        }
    }

    #[test]
    fn crop_out_of_bounds_clamps_with_min_side() {
        let img = random_image(3, 64, 48);
        let c = CropRegion::new(0.9, 0.9, 2.0, 2.0);
        let out = crop_extract(&img, &c);
        assert!(out.width() >= 8 && out.height() >= 8);
        assert!(out.width() <= 64 && out.height() <= 48);
    }

    #[test]
    fn downscale_under_cap_is_identity() {
        let img = random_image(4, 100, 80);
        assert_eq!(downscale_cap(&img, 256), img);
    }

    #[test]
    fn downscale_factor_two_matches_block_mean() {
        let img = random_image(5, 512, 256);
        let out = downscale_cap(&img, 256);
        assert_eq!((out.width(), out.height()), (256, 128));
        // Brute-force 2x2 block mean oracle on a sample of cells.
        for (ox, oy) in [(0u32, 0u32), (17, 9), (255, 127), (100, 64)] {
            for ch in 0..CHANNELS {
                let mut sum = 0f64;
                for dy in 0..2 {
                    for dx in 0..2 {
                        sum += f64::from(img.at(ox * 2 + dx, oy * 2 + dy, ch));
                    }
                }
                let expected = (sum / 4.0) as f32;
                assert!((out.at(ox, oy, ch) - expected).abs() < 1e-6);
            }
        }
        // Global mean preserved for exact-integer factors.
        assert!((img.mean() - out.mean()).abs() < 1e-6);
    }

    #[test]
    fn downscale_constant_image_stays_constant() {
        let img = Image::filled(300, 70, 0.625);
        let out = downscale_cap(&img, 128);
        assert!(out.pixels().iter().all(|&v| (v - 0.625).abs() < 1e-6));
    }

    #[test]
    fn hflip_is_involution_and_preserves_multiset() {
        let img = random_image(6, 11, 7);
        assert_eq!(hflip(&hflip(&img)), img);

        let flipped = hflip(&img);
        let mut a: Vec<u32> = img.pixels().iter().map(|v| v.to_bits()).collect();
        let mut b: Vec<u32> = flipped.pixels().iter().map(|v| v.to_bits()).collect();
        a.sort_unstable();
        b.sort_unstable();
        assert_eq!(a, b);
    }

    #[test]
    fn hflip_minimal_and_symmetric_cases() {
        let img = Image::from_pixels(2, 1, vec![0.1, 0.2, 0.3, 0.7, 0.8, 0.9]);
        let flipped = hflip(&img);
        assert_eq!(flipped.pixels(), &[0.7, 0.8, 0.9, 0.1, 0.2, 0.3]);

        let constant_cols = Image::from_pixels(3, 2, vec![0.5; 18]);
        assert_eq!(hflip(&constant_cols), constant_cols);
    }
}
