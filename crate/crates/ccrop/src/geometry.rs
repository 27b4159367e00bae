//! Crop-region arithmetic, coordinate normalization and the IoU/BDE metrics.
//!
//! All model-internal state uses normalized coordinates: pixel values divided
//! by `max(width, height)` of the source image, so both axes share one unit
//! and aspect ratio stays meaningful. Annotation files store pixel
//! coordinates; [`normalize`]/[`denormalize`] convert at the boundary.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Minimum crop side, in pixels, enforced at denormalization. Keeps the
/// feature-extraction window non-empty after repeated pooling.
pub const MIN_CROP_SIDE_PX: u32 = 8;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("degenerate region: zero width or height after canonicalization")]
    DegenerateRegion,
    #[error("non-finite coordinate in rectangle")]
    NonFinite,
}

/// Pixel dimensions of an image. Carries the normalization divisor
/// `max(width, height)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageDims {
    pub width: u32,
    pub height: u32,
}

impl ImageDims {
    pub fn new(width: u32, height: u32) -> Self {
        assert!(width >= 1 && height >= 1, "image dims must be positive");
        Self { width, height }
    }

    pub fn max_side(&self) -> u32 {
        self.width.max(self.height)
    }
}

/// Axis-aligned rectangle in pixel coordinates, corners inclusive-exclusive
/// (`x1..x2`, `y1..y2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PixelRect {
    pub x1: u32,
    pub y1: u32,
    pub x2: u32,
    pub y2: u32,
}

impl PixelRect {
    pub fn width(&self) -> u32 {
        self.x2 - self.x1
    }

    pub fn height(&self) -> u32 {
        self.y2 - self.y1
    }
}

/// Crop rectangle in normalized coordinates: top-left `(x1, y1)` and
/// bottom-right `(x2, y2)`, each pixel coordinate divided by the maximum
/// image side.
///
/// Intermediate cascade states may transiently hold inverted or out-of-bounds
/// values; [`CropRegion::canonicalized`] repairs inversion by swapping, and
/// clamping into the image happens only at feature-extraction /
/// denormalization time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CropRegion {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

impl CropRegion {
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Self {
        Self { x1, y1, x2, y2 }
    }

    /// Full-frame region for an image: `(0, 0, W/max, H/max)`.
    pub fn full_frame(dims: ImageDims) -> Self {
        let d = f64::from(dims.max_side());
        Self::new(
            0.0,
            0.0,
            f64::from(dims.width) / d,
            f64::from(dims.height) / d,
        )
    }

    pub fn is_canonical(&self) -> bool {
        self.x1 < self.x2 && self.y1 < self.y2
    }

    /// Repairs an inverted rectangle by swapping coordinates per axis.
    pub fn canonicalized(&self) -> Self {
        let (x1, x2) = if self.x1 <= self.x2 {
            (self.x1, self.x2)
        } else {
            (self.x2, self.x1)
        };
        let (y1, y2) = if self.y1 <= self.y2 {
            (self.y1, self.y2)
        } else {
            (self.y2, self.y1)
        };
        Self { x1, y1, x2, y2 }
    }

    pub fn width(&self) -> f64 {
        self.x2 - self.x1
    }

    pub fn height(&self) -> f64 {
        self.y2 - self.y1
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    /// Rectangle scaled about its centroid by `factor` per side.
    pub fn scaled_about_center(&self, factor: f64) -> Self {
        let cx = 0.5 * (self.x1 + self.x2);
        let cy = 0.5 * (self.y1 + self.y2);
        let hw = 0.5 * self.width() * factor;
        let hh = 0.5 * self.height() * factor;
        Self::new(cx - hw, cy - hh, cx + hw, cy + hh)
    }

    /// Coordinate by index, in `(x1, y1, x2, y2)` order.
    pub fn coord(&self, index: usize) -> f64 {
        match index {
            0 => self.x1,
            1 => self.y1,
            2 => self.x2,
            3 => self.y2,
            _ => panic!("coordinate index out of range: {index}"),
        }
    }

    /// Mutable coordinate by index, in `(x1, y1, x2, y2)` order.
    pub fn coord_mut(&mut self, index: usize) -> &mut f64 {
        match index {
            0 => &mut self.x1,
            1 => &mut self.y1,
            2 => &mut self.x2,
            3 => &mut self.y2,
            _ => panic!("coordinate index out of range: {index}"),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.y1.is_finite() && self.x2.is_finite() && self.y2.is_finite()
    }
}

/// Converts a pixel rectangle to normalized coordinates by dividing each
/// coordinate by `max(width, height)`, canonicalizing (swap on inversion).
pub fn normalize(rect_px: [f64; 4], dims: ImageDims) -> Result<CropRegion, GeometryError> {
    if rect_px.iter().any(|v| !v.is_finite()) {
        return Err(GeometryError::NonFinite);
    }
    let d = f64::from(dims.max_side());
    let r = CropRegion::new(
        rect_px[0] / d,
        rect_px[1] / d,
        rect_px[2] / d,
        rect_px[3] / d,
    )
    .canonicalized();
    if r.width() == 0.0 || r.height() == 0.0 {
        return Err(GeometryError::DegenerateRegion);
    }
    Ok(r)
}

fn round_half_up(v: f64) -> i64 {
    (v + 0.5).floor() as i64
}

// Expand [a, b] to at least `min_side`, symmetric about the midpoint, then
// shift back into [0, limit] keeping the side where the image allows. Images
// narrower than `min_side` keep the rounded window as-is.
fn expand_axis(mut a: i64, mut b: i64, min_side: i64, limit: i64) -> (i64, i64) {
    if limit >= min_side && b - a < min_side {
        let sum = a + b;
        a = (sum - min_side).div_euclid(2);
        b = a + min_side;
    }
    if b <= a {
        // Degenerate after rounding on a tiny image: take one pixel.
        b = (a + 1).min(limit);
        a = b - 1;
    }
    if a < 0 {
        b -= a;
        a = 0;
    }
    if b > limit {
        a -= b - limit;
        b = limit;
    }
    (a.max(0), b.min(limit))
}

/// Converts a normalized region back to an integer pixel rectangle.
///
/// Multiplies by `max(width, height)`, rounds half-up, clamps into the image
/// and enforces a minimum side of [`MIN_CROP_SIDE_PX`] by symmetric expansion
/// about the center (re-clamped afterwards). Always yields a valid rectangle.
pub fn denormalize(c: &CropRegion, dims: ImageDims) -> PixelRect {
    let c = c.canonicalized();
    let d = f64::from(dims.max_side());
    let w = i64::from(dims.width);
    let h = i64::from(dims.height);
    let min_side = i64::from(MIN_CROP_SIDE_PX);

    let x1 = round_half_up(c.x1 * d).clamp(0, w);
    let x2 = round_half_up(c.x2 * d).clamp(0, w);
    let y1 = round_half_up(c.y1 * d).clamp(0, h);
    let y2 = round_half_up(c.y2 * d).clamp(0, h);

    let (x1, x2) = expand_axis(x1, x2, min_side, w);
    let (y1, y2) = expand_axis(y1, y2, min_side, h);

    PixelRect {
        x1: x1 as u32,
        y1: y1 as u32,
        x2: x2 as u32,
        y2: y2 as u32,
    }
}

/// Intersection over union of two canonical regions; 0 when disjoint.
pub fn iou(a: &CropRegion, b: &CropRegion) -> f64 {
    debug_assert!(a.is_canonical() && b.is_canonical());
    let ix = (a.x2.min(b.x2) - a.x1.max(b.x1)).max(0.0);
    let iy = (a.y2.min(b.y2) - a.y1.max(b.y1)).max(0.0);
    let inter = ix * iy;
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        0.0
    } else {
        inter / union
    }
}

/// Boundary displacement averaging mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BdeMode {
    /// Mean squared displacement of the four edges (primary mode).
    #[default]
    Squared,
    /// Mean absolute displacement of the four edges.
    Absolute,
}

/// Boundary displacement error between two regions in normalized
/// coordinates: the four per-edge displacements averaged either squared
/// (primary) or absolute, per `mode`.
pub fn bde(p: &CropRegion, m: &CropRegion, mode: BdeMode) -> f64 {
    let d = [p.x1 - m.x1, p.y1 - m.y1, p.x2 - m.x2, p.y2 - m.y2];
    match mode {
        BdeMode::Squared => d.iter().map(|v| v * v).sum::<f64>() / 4.0,
        BdeMode::Absolute => d.iter().map(|v| v.abs()).sum::<f64>() / 4.0,
    }
}
