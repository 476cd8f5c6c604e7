//! Synthetic degraded documents with exact ground truth, shared by the
//! criterion benches and the runtime acceptance check.

use docbin_core::{BinaryImage, GrayImage};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Knobs for [`document`].
#[derive(Debug, Clone, Copy)]
pub struct PageStyle {
    pub ink: u8,
    pub paper: u8,
    /// Paper brightness drop across the page, left to right.
    pub gradient: u8,
    /// Amplitude of uniform pixel noise.
    pub noise: u8,
    /// Number of dark blotches.
    pub blotches: usize,
}

impl Default for PageStyle {
    fn default() -> Self {
        Self {
            ink: 45,
            paper: 215,
            gradient: 40,
            noise: 12,
            blotches: 3,
        }
    }
}

/// Renders rows of pseudo-glyphs (strokes, bars and loops) onto paper and
/// returns the page with its ink mask. Blotches darken the paper without
/// adding ground-truth ink.
pub fn document(seed: u64, width: usize, height: usize, style: PageStyle) -> (GrayImage, BinaryImage) {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut gt = BinaryImage::background(width, height).expect("positive dimensions");
    let line_pitch = 28;
    let mut y0 = 10;
    while y0 + 20 < height {
        let mut x = 8 + rng.gen_range(0..6);
        while x + 14 < width {
            let glyph_w = rng.gen_range(6..13);
            let stroke = rng.gen_range(2..4);
            let kind = rng.gen_range(0..4);
            for dy in 0..18 {
                for dx in 0..glyph_w {
                    let ink = match kind {
                        0 => dx < stroke || dx + stroke >= glyph_w,
                        1 => dy < stroke || dy + stroke >= 18 || dx < stroke,
                        2 => dx < stroke || (dy >= 8 && dy < 8 + stroke),
                        _ => (dx as isize - dy as isize * glyph_w as isize / 18).abs() < stroke as isize,
                    };
                    if ink {
                        gt.set(x + dx, y0 + dy, true);
                    }
                }
            }
            x += glyph_w + rng.gen_range(3..7) + if rng.gen_bool(0.2) { 10 } else { 0 };
        }
        y0 += line_pitch;
    }

    let blotches: Vec<(f64, f64, f64, f64)> = (0..style.blotches)
        .map(|_| {
            (
                rng.gen_range(0.0..width as f64),
                rng.gen_range(0.0..height as f64),
                rng.gen_range(15.0..45.0),
                rng.gen_range(60.0..120.0),
            )
        })
        .collect();

    let img = GrayImage::from_fn(width, height, |x, y| {
        let mut paper = style.paper as f64 - style.gradient as f64 * x as f64 / width as f64;
        for &(cx, cy, r, depth) in &blotches {
            let d2 = ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)) / (r * r);
            if d2 < 1.0 {
                paper -= depth * (1.0 - d2);
            }
        }
        let base = if gt.is_fg(x, y) { style.ink as f64 } else { paper };
        let n = style.noise as f64;
        (base + rng.gen_range(-n..=n)).round().clamp(0.0, 255.0) as u8
    })
    .expect("positive dimensions");
    (img, gt)
}

/// `count` pages of `width x height` with consecutive seeds.
pub fn corpus(count: usize, width: usize, height: usize) -> Vec<(GrayImage, BinaryImage)> {
    (0..count as u64).map(|s| document(1000 + s, width, height, PageStyle::default())).collect()
}
