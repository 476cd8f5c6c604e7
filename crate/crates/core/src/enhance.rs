//! Contrast measurement and contrast-gated CLAHE.
//!
//! The gate measures the average Michelson contrast of all 3x3
//! neighborhoods. Images whose average falls below `t_ctr` are equalized with
//! CLAHE; everything else passes through untouched.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{window_min_max, GrayImage};

/// Side of the neighborhood used for local contrast.
pub const CONTRAST_WINDOW: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClaheParams {
    /// `(cols, rows)` of the tile grid.
    pub tile_grid: (usize, usize),
    /// Slope limit relative to a flat histogram.
    pub clip_limit: f64,
    /// Keeps the Michelson denominator positive on black neighborhoods.
    pub epsilon: f64,
}

impl Default for ClaheParams {
    fn default() -> Self {
        Self {
            tile_grid: (8, 8),
            clip_limit: 2.0,
            epsilon: 1e-9,
        }
    }
}

impl ClaheParams {
    pub fn validate(&self) -> Result<()> {
        if self.tile_grid.0 == 0 || self.tile_grid.1 == 0 {
            return Err(Error::InvalidParams("CLAHE tile grid must be at least 1x1".into()));
        }
        if !(self.clip_limit > 0.0) || !self.clip_limit.is_finite() {
            return Err(Error::InvalidParams(format!("CLAHE clip limit must be > 0, got {}", self.clip_limit)));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidParams(format!("epsilon must be > 0, got {}", self.epsilon)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContrastReport {
    /// Average local contrast of the input, in `[0, 1]`.
    pub local_avg_contrast: f64,
    pub enhanced: bool,
}

/// `(i_max - i_min) / (i_max + i_min + epsilon)`.
#[inline]
pub fn michelson_contrast(i_max: u8, i_min: u8, epsilon: f64) -> f64 {
    debug_assert!(i_min <= i_max);
    (i_max as f64 - i_min as f64) / (i_max as f64 + i_min as f64 + epsilon)
}

/// Mean Michelson contrast over the border-clamped 3x3 neighborhood of every
/// pixel.
pub fn local_average_contrast(img: &GrayImage, epsilon: f64) -> f64 {
    let (mins, maxs) = window_min_max(img, CONTRAST_WINDOW);
    let total: f64 = mins
        .iter()
        .zip(&maxs)
        .map(|(&lo, &hi)| michelson_contrast(hi, lo, epsilon))
        .sum();
    total / mins.len() as f64
}

/// Contrast-limited adaptive histogram equalization.
///
/// The image is covered by `tile_grid` equal tiles (the last row/column is
/// padded by edge replication). Each tile histogram is clipped at
/// `clip_limit * tile_pixels / 256`, the excess is spread uniformly with the
/// remainder distributed round-robin, and the tile CDF becomes a mapping.
/// Output pixels interpolate bilinearly between the four nearest tile centers.
/// Images narrower or shorter than the grid fall back to a single tile.
pub fn clahe(img: &GrayImage, params: &ClaheParams) -> Result<GrayImage> {
    params.validate()?;
    let (w, h) = img.dimensions();
    let (mut cols, mut rows) = params.tile_grid;
    if w < cols || h < rows {
        cols = 1;
        rows = 1;
    }
    let tile_w = w.div_ceil(cols);
    let tile_h = h.div_ceil(rows);
    let tile_pixels = (tile_w * tile_h) as u64;
    let clip = ((params.clip_limit * tile_pixels as f64 / 256.0) as u64).max(1);
    let scale = 255.0 / tile_pixels as f64;

    let mut luts = vec![[0f64; 256]; cols * rows];
    for ty in 0..rows {
        for tx in 0..cols {
            let mut hist = [0u64; 256];
            for y in ty * tile_h..(ty + 1) * tile_h {
                let sy = y.min(h - 1);
                for x in tx * tile_w..(tx + 1) * tile_w {
                    hist[img.get(x.min(w - 1), sy) as usize] += 1;
                }
            }
            clip_histogram(&mut hist, clip);
            let lut = &mut luts[ty * cols + tx];
            let mut cdf = 0u64;
            for (v, &count) in hist.iter().enumerate() {
                cdf += count;
                lut[v] = cdf as f64 * scale;
            }
        }
    }

    // Tile-center coordinates: fractional position relative to tile centers.
    let axis = |p: usize, tile: usize, n: usize| -> (usize, usize, f64) {
        let t = (p as f64 + 0.5) / tile as f64 - 0.5;
        if t <= 0.0 {
            return (0, 0, 0.0);
        }
        let lo = t.floor() as usize;
        if lo >= n - 1 {
            return (n - 1, n - 1, 0.0);
        }
        (lo, lo + 1, t - lo as f64)
    };

    let x_axis: Vec<_> = (0..w).map(|x| axis(x, tile_w, cols)).collect();
    GrayImage::from_fn(w, h, |x, y| {
        let (y0, y1, fy) = axis(y, tile_h, rows);
        let (x0, x1, fx) = x_axis[x];
        let v = img.get(x, y) as usize;
        let top = luts[y0 * cols + x0][v] * (1.0 - fx) + luts[y0 * cols + x1][v] * fx;
        let bottom = luts[y1 * cols + x0][v] * (1.0 - fx) + luts[y1 * cols + x1][v] * fx;
        let out = top * (1.0 - fy) + bottom * fy;
        out.round().clamp(0.0, 255.0) as u8
    })
}

/// Clips every bin at `limit` and returns the excess to the histogram:
/// an equal share per bin, then the remainder one count at a time on an
/// evenly strided subset of bins.
fn clip_histogram(hist: &mut [u64; 256], limit: u64) {
    let mut excess = 0u64;
    for bin in hist.iter_mut() {
        if *bin > limit {
            excess += *bin - limit;
            *bin = limit;
        }
    }
    let share = excess / 256;
    let mut residual = excess % 256;
    for bin in hist.iter_mut() {
        *bin += share;
    }
    if residual > 0 {
        let step = (256 / residual as usize).max(1);
        let mut i = 0;
        while i < 256 && residual > 0 {
            hist[i] += 1;
            residual -= 1;
            i += step;
        }
    }
}

/// Applies CLAHE only when the average local contrast is below `t_ctr`.
pub fn gate_and_enhance(img: &GrayImage, t_ctr: f64, params: &ClaheParams) -> Result<(GrayImage, ContrastReport)> {
    params.validate()?;
    if !(t_ctr > 0.0 && t_ctr < 1.0) {
        return Err(Error::InvalidParams(format!("contrast gate must lie in (0, 1), got {t_ctr}")));
    }
    let contrast = local_average_contrast(img, params.epsilon);
    if contrast < t_ctr {
        let enhanced = clahe(img, params)?;
        Ok((
            enhanced,
            ContrastReport {
                local_avg_contrast: contrast,
                enhanced: true,
            },
        ))
    } else {
        Ok((
            img.clone(),
            ContrastReport {
                local_avg_contrast: contrast,
                enhanced: false,
            },
        ))
    }
}
