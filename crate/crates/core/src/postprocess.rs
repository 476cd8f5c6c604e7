//! Morphological clean-up of a binarized page:
//!
//! 1. drop foreground pixels with no 8-neighbor,
//! 2. fill single-pixel gaps,
//! 3. drop connected components larger than `lambda * m / s`,
//! 4. remove single-pixel convexities and fill single-pixel concavities.
//!
//! Step 3 removes *large* components (`m` and `s` are the mean and population
//! standard deviation of component sizes). It is skipped when there are fewer
//! than two components or all components have the same size.
//!
//! Every step reads a snapshot of its input and writes a fresh image, so the
//! outcome never depends on scan order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{connected_components, BinaryImage};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PostprocessParams {
    pub lambda: f64,
}

impl Default for PostprocessParams {
    fn default() -> Self {
        Self { lambda: 15.0 }
    }
}

impl PostprocessParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidParams(format!("lambda must be > 0, got {}", self.lambda)));
        }
        Ok(())
    }
}

const ORTHOGONAL: [(isize, isize); 4] = [(0, -1), (-1, 0), (1, 0), (0, 1)];
const EIGHT: [(isize, isize); 8] = [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)];

fn count_fg(bin: &BinaryImage, x: usize, y: usize, offsets: &[(isize, isize)]) -> usize {
    offsets
        .iter()
        .filter(|(dx, dy)| bin.is_fg_at(x as isize + dx, y as isize + dy))
        .count()
}

fn map_pixels(bin: &BinaryImage, f: impl Fn(usize, usize, bool) -> bool) -> BinaryImage {
    BinaryImage::from_fn(bin.width(), bin.height(), |x, y| f(x, y, bin.is_fg(x, y))).expect("same dimensions")
}

/// Foreground pixels with no foreground among their 8 neighbors become
/// background.
pub fn remove_isolated(bin: &BinaryImage) -> BinaryImage {
    map_pixels(bin, |x, y, fg| fg && count_fg(bin, x, y, &EIGHT) > 0)
}

/// Background pixels whose four orthogonal neighbors are all foreground
/// become foreground.
pub fn fill_gaps(bin: &BinaryImage) -> BinaryImage {
    map_pixels(bin, |x, y, fg| fg || count_fg(bin, x, y, &ORTHOGONAL) == 4)
}

/// Components with more than `lambda * m / s` pixels become background.
pub fn filter_components(bin: &BinaryImage, p: &PostprocessParams) -> BinaryImage {
    let cc = connected_components(bin);
    let sizes = cc.component_sizes();
    if sizes.len() < 2 {
        return bin.clone();
    }
    let n = sizes.len() as f64;
    let mean = sizes.iter().sum::<usize>() as f64 / n;
    let var = sizes.iter().map(|&s| (s as f64 - mean).powi(2)).sum::<f64>() / n;
    let first = sizes[0];
    if var == 0.0 || sizes.iter().all(|&s| s == first) {
        return bin.clone();
    }
    let limit = p.lambda * mean / var.sqrt();
    let drop: Vec<bool> = cc.sizes().iter().map(|&s| s as f64 > limit).collect();
    let data = cc.labels().iter().map(|&l| l != 0 && !drop[l as usize]).collect();
    BinaryImage::new(bin.width(), bin.height(), data).expect("same dimensions")
}

/// True when `(x, y)` has exactly one orthogonal foreground neighbor and every
/// foreground 8-neighbor lies on that neighbor's side.
fn is_convexity(bin: &BinaryImage, x: usize, y: usize) -> bool {
    let (xi, yi) = (x as isize, y as isize);
    let mut support = None;
    for &(dx, dy) in &ORTHOGONAL {
        if bin.is_fg_at(xi + dx, yi + dy) {
            if support.is_some() {
                return false;
            }
            support = Some((dx, dy));
        }
    }
    let Some((sx, sy)) = support else {
        return false;
    };
    // Every foreground 8-neighbor must share the support's row or column
    // offset, i.e. lie in the three pixels beyond the supporting edge.
    EIGHT.iter().all(|&(dx, dy)| {
        let on_support_side = if sx != 0 { dx == sx } else { dy == sy };
        on_support_side || !bin.is_fg_at(xi + dx, yi + dy)
    })
}

/// One simultaneous pass over the input snapshot:
///
/// - convexity: a foreground pixel attached by exactly one orthogonal
///   neighbor, with all of its foreground 8-neighbors on that same side,
///   becomes background (bumps on edges, stroke end pixels);
/// - concavity: a background pixel with exactly three orthogonal foreground
///   neighbors becomes foreground (notches).
pub fn fix_pixel_artifacts(bin: &BinaryImage) -> BinaryImage {
    map_pixels(bin, |x, y, fg| {
        if fg {
            !is_convexity(bin, x, y)
        } else {
            count_fg(bin, x, y, &ORTHOGONAL) == 3
        }
    })
}

/// Isolated-pixel removal, gap filling, component filtering and artifact
/// repair, in that order.
pub fn postprocess(bin: &BinaryImage, p: &PostprocessParams) -> BinaryImage {
    let step = remove_isolated(bin);
    let step = fill_gaps(&step);
    let step = filter_components(&step, p);
    fix_pixel_artifacts(&step)
}
