//! Skeleton-based pseudo F-Measure.
//!
//! Pseudo-recall measures how much of the ground-truth skeleton the
//! binarization covers, so stroke thickness errors do not count against it.
//! Pseudo-precision measures how much of the binarized ink lies within the
//! ground truth dilated by half its median stroke width. This is an
//! approximation of the contour-weighted DIBCO tool; expect pseudo F-Measure
//! values within a few points of it, not bit-exact agreement.

use super::harmonic_percent;
use crate::error::{Error, Result};
use crate::raster::{window_min_max, BinaryImage, GrayImage};

/// Hit-or-miss element: `Some(true)` must be foreground, `Some(false)` must be
/// background, `None` is don't-care. Indexed `[row][col]`.
type Element = [[Option<bool>; 3]; 3];

const T: Option<bool> = Some(true);
const F: Option<bool> = Some(false);
const X: Option<bool> = None;

const EDGE: Element = [[F, F, F], [X, T, X], [T, T, T]];
const CORNER: Element = [[X, F, F], [T, T, F], [X, T, X]];

fn rotate(e: &Element) -> Element {
    let mut out = [[None; 3]; 3];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            *cell = e[2 - c][r];
        }
    }
    out
}

fn thinning_elements() -> Vec<Element> {
    let mut elements = Vec::with_capacity(8);
    let (mut edge, mut corner) = (EDGE, CORNER);
    for _ in 0..4 {
        elements.push(edge);
        elements.push(corner);
        edge = rotate(&edge);
        corner = rotate(&corner);
    }
    elements
}

fn hits(img: &BinaryImage, x: usize, y: usize, e: &Element) -> bool {
    e.iter().enumerate().all(|(r, row)| {
        row.iter().enumerate().all(|(c, want)| match want {
            None => true,
            Some(v) => img.is_fg_at(x as isize + c as isize - 1, y as isize + r as isize - 1) == *v,
        })
    })
}

/// Morphological thinning to a one-pixel-wide 8-connected skeleton: the eight
/// rotated edge/corner hit-or-miss elements are applied in sequence, each in
/// parallel over the image, until nothing changes.
pub fn skeletonize(img: &BinaryImage) -> BinaryImage {
    let elements = thinning_elements();
    let mut current = img.clone();
    let (w, h) = img.dimensions();
    loop {
        let mut changed = false;
        for e in &elements {
            let mut removals = Vec::new();
            for y in 0..h {
                for x in 0..w {
                    if current.is_fg(x, y) && hits(&current, x, y, e) {
                        removals.push((x, y));
                    }
                }
            }
            changed |= !removals.is_empty();
            for (x, y) in removals {
                current.set(x, y, false);
            }
        }
        if !changed {
            return current;
        }
    }
}

/// Chessboard distance from each foreground pixel to the nearest background
/// pixel, treating everything outside the image as background. Background
/// pixels get 0, foreground pixels touching background get 1.
fn chessboard_distance(img: &BinaryImage) -> Vec<u32> {
    let (w, h) = img.dimensions();
    let inf = u32::MAX / 2;
    let mut d: Vec<u32> = img.as_raw().iter().map(|&fg| if fg { inf } else { 0 }).collect();
    let at = |d: &Vec<u32>, x: isize, y: isize| -> u32 {
        if x < 0 || y < 0 || x >= w as isize || y >= h as isize {
            0
        } else {
            d[y as usize * w + x as usize]
        }
    };
    for y in 0..h as isize {
        for x in 0..w as isize {
            let i = y as usize * w + x as usize;
            if d[i] == 0 {
                continue;
            }
            let best = [(-1, -1), (0, -1), (1, -1), (-1, 0)]
                .iter()
                .map(|(dx, dy)| at(&d, x + dx, y + dy))
                .min()
                .unwrap_or(0);
            d[i] = d[i].min(best + 1);
        }
    }
    for y in (0..h as isize).rev() {
        for x in (0..w as isize).rev() {
            let i = y as usize * w + x as usize;
            if d[i] == 0 {
                continue;
            }
            let best = [(1, 1), (0, 1), (-1, 1), (1, 0)]
                .iter()
                .map(|(dx, dy)| at(&d, x + dx, y + dy))
                .min()
                .unwrap_or(0);
            d[i] = d[i].min(best + 1);
        }
    }
    d
}

/// Median stroke width of `gt`, estimated as `2 d - 1` at skeleton pixels,
/// where `d` is the chessboard distance to background. `None` without ink.
pub fn median_stroke_width(gt: &BinaryImage, skeleton: &BinaryImage) -> Option<u32> {
    let dist = chessboard_distance(gt);
    let mut widths: Vec<u32> = skeleton
        .as_raw()
        .iter()
        .zip(&dist)
        .filter(|(&s, _)| s)
        .map(|(_, &d)| 2 * d.max(1) - 1)
        .collect();
    if widths.is_empty() {
        return None;
    }
    let mid = widths.len() / 2;
    Some(*widths.select_nth_unstable(mid).1)
}

/// Dilation by a `(2 radius + 1)` square.
pub fn dilate(img: &BinaryImage, radius: usize) -> BinaryImage {
    if radius == 0 {
        return img.clone();
    }
    let gray = GrayImage::new(
        img.width(),
        img.height(),
        img.as_raw().iter().map(|&fg| if fg { 255 } else { 0 }).collect(),
    )
    .expect("same dimensions");
    let (_, maxs) = window_min_max(&gray, 2 * radius + 1);
    BinaryImage::new(img.width(), img.height(), maxs.iter().map(|&v| v == 255).collect())
        .expect("same dimensions")
}

/// Pseudo F-Measure in percent. Pseudo-recall is clamped to `[0, 1]` and
/// pseudo-precision to `[0, 2]`.
pub fn pseudo_f_measure(bin: &BinaryImage, gt: &BinaryImage) -> Result<f64> {
    bin.same_dimensions(gt)?;
    let skeleton = skeletonize(gt);
    let skeleton_px = skeleton.fg_count();
    if skeleton_px == 0 {
        return Err(Error::EmptyGroundTruth);
    }
    let covered = bin
        .as_raw()
        .iter()
        .zip(skeleton.as_raw())
        .filter(|(&b, &s)| b && s)
        .count();
    let recall = (covered as f64 / skeleton_px as f64).clamp(0.0, 1.0);

    let width = median_stroke_width(gt, &skeleton).unwrap_or(1);
    let tolerance = dilate(gt, (width as usize / 2).max(1));
    let ink = bin.fg_count();
    let precision = if ink == 0 {
        0.0
    } else {
        let inside = bin
            .as_raw()
            .iter()
            .zip(tolerance.as_raw())
            .filter(|(&b, &t)| b && t)
            .count();
        (inside as f64 / ink as f64).clamp(0.0, 2.0)
    };
    Ok(harmonic_percent(recall, precision))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{confusion, f_measure};
    use crate::raster::connected_components;

    fn thick_strokes() -> BinaryImage {
        BinaryImage::from_fn(60, 40, |x, y| {
            ((5..12).contains(&x) && (4..36).contains(&y)) || ((20..50).contains(&x) && (16..23).contains(&y))
        })
        .unwrap()
    }

    #[test]
    fn skeleton_is_thin_and_inside() {
        let gt = thick_strokes();
        let skel = skeletonize(&gt);
        assert!(skel.fg_count() > 0);
        for y in 0..gt.height() {
            for x in 0..gt.width() {
                if skel.is_fg(x, y) {
                    assert!(gt.is_fg(x, y));
                }
                // no 2x2 solid block survives thinning
                if x + 1 < gt.width() && y + 1 < gt.height() {
                    let block = [(x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)];
                    assert!(!block.iter().all(|&(a, b)| skel.is_fg(a, b)));
                }
            }
        }
        assert_eq!(connected_components(&skel).count(), connected_components(&gt).count());
    }

    #[test]
    fn stroke_width_estimate() {
        let gt = BinaryImage::from_fn(40, 20, |_, y| (5..10).contains(&y)).unwrap();
        let skel = skeletonize(&gt);
        assert_eq!(median_stroke_width(&gt, &skel), Some(5));
    }

    #[test]
    fn dilation_grows_by_radius() {
        let mut dot = BinaryImage::background(9, 9).unwrap();
        dot.set(4, 4, true);
        assert_eq!(dilate(&dot, 1).fg_count(), 9);
        assert_eq!(dilate(&dot, 2).fg_count(), 25);
        assert_eq!(dilate(&dot, 0), dot);
    }

    #[test]
    fn perfect_and_empty() {
        let gt = thick_strokes();
        assert_eq!(pseudo_f_measure(&gt, &gt).unwrap(), 100.0);
        let blank = BinaryImage::background(60, 40).unwrap();
        assert_eq!(pseudo_f_measure(&blank, &gt).unwrap(), 0.0);
        assert!(matches!(pseudo_f_measure(&gt, &blank), Err(Error::EmptyGroundTruth)));
    }

    #[test]
    fn eroded_strokes_score_higher_than_fm() {
        let gt = thick_strokes();
        let eroded = BinaryImage::from_fn(60, 40, |x, y| {
            [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)]
                .iter()
                .all(|(dx, dy)| gt.is_fg_at(x as isize + dx, y as isize + dy))
        })
        .unwrap();
        let fm = f_measure(&confusion(&eroded, &gt).unwrap());
        let pfm = pseudo_f_measure(&eroded, &gt).unwrap();
        assert!(pfm > fm, "pfm {pfm} fm {fm}");
    }
}
