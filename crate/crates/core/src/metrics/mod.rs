//! Binarization quality metrics against a ground-truth mask.
//!
//! Foreground (ink) is the positive class throughout. F-Measure and pseudo
//! F-Measure are percentages, DRD is dimensionless (lower is better) and PSNR
//! is in decibels on {0, 1}-valued images, with `f64::INFINITY` for a perfect
//! match.

mod report;
mod skeleton;

pub use report::{csv_field, format_value, inf_string, EvalReport, ImageScores, MetricToggles};
pub use skeleton::{dilate, median_stroke_width, pseudo_f_measure, skeletonize};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::BinaryImage;

/// Block side used to count non-uniform ground-truth blocks.
pub const NUBN_BLOCK: usize = 8;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

impl Confusion {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn confusion(bin: &BinaryImage, gt: &BinaryImage) -> Result<Confusion> {
    bin.same_dimensions(gt)?;
    let mut c = Confusion::default();
    for (&b, &g) in bin.as_raw().iter().zip(gt.as_raw()) {
        match (b, g) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    Ok(c)
}

/// Harmonic mean of a recall and a precision, in percent; 0 when both are 0.
pub fn harmonic_percent(recall: f64, precision: f64) -> f64 {
    if recall + precision <= 0.0 {
        return 0.0;
    }
    100.0 * 2.0 * recall * precision / (recall + precision)
}

/// F-Measure in percent; 0 when there are no true positives.
pub fn f_measure(c: &Confusion) -> f64 {
    if c.tp == 0 {
        return 0.0;
    }
    harmonic_percent(c.recall(), c.precision())
}

/// Number of grid-aligned 8x8 blocks of `gt` (partial edge blocks included)
/// containing both foreground and background.
pub fn nubn(gt: &BinaryImage) -> usize {
    let (w, h) = gt.dimensions();
    let mut count = 0;
    for by in (0..h).step_by(NUBN_BLOCK) {
        for bx in (0..w).step_by(NUBN_BLOCK) {
            let mut fg = false;
            let mut bg = false;
            for y in by..(by + NUBN_BLOCK).min(h) {
                for x in bx..(bx + NUBN_BLOCK).min(w) {
                    if gt.is_fg(x, y) {
                        fg = true;
                    } else {
                        bg = true;
                    }
                }
            }
            if fg && bg {
                count += 1;
            }
        }
    }
    count
}

/// 5x5 reciprocal-distance weights: `1 / sqrt(i^2 + j^2)` off center, 0 at
/// the center, normalized to sum to 1. Indexed `[j + 2][i + 2]`.
pub fn drd_weights() -> [[f64; 5]; 5] {
    let mut w = [[0.0; 5]; 5];
    let mut total = 0.0;
    for (j, row) in w.iter_mut().enumerate() {
        for (i, cell) in row.iter_mut().enumerate() {
            let (di, dj) = (i as f64 - 2.0, j as f64 - 2.0);
            if di != 0.0 || dj != 0.0 {
                *cell = 1.0 / (di * di + dj * dj).sqrt();
                total += *cell;
            }
        }
    }
    for cell in w.iter_mut().flatten() {
        *cell /= total;
    }
    w
}

/// Distance Reciprocal Distortion: for every pixel where `bin` and `gt`
/// disagree, the weighted count of 5x5 ground-truth neighbors (border-clamped)
/// differing from the binarized value, summed and divided by [`nubn`].
pub fn drd(bin: &BinaryImage, gt: &BinaryImage) -> Result<f64> {
    bin.same_dimensions(gt)?;
    let (w, h) = gt.dimensions();
    let weights = drd_weights();
    let mut total = 0.0;
    let mut flipped = 0usize;
    for y in 0..h {
        for x in 0..w {
            let b = bin.is_fg(x, y);
            if b == gt.is_fg(x, y) {
                continue;
            }
            flipped += 1;
            for (j, row) in weights.iter().enumerate() {
                let gy = (y as isize + j as isize - 2).clamp(0, h as isize - 1) as usize;
                for (i, &wt) in row.iter().enumerate() {
                    let gx = (x as isize + i as isize - 2).clamp(0, w as isize - 1) as usize;
                    if gt.is_fg(gx, gy) != b {
                        total += wt;
                    }
                }
            }
        }
    }
    if flipped == 0 {
        return Ok(0.0);
    }
    match nubn(gt) {
        0 => Err(Error::UndefinedDistortion),
        blocks => Ok(total / blocks as f64),
    }
}

/// PSNR with images mapped to {0, 1} and a peak of 1: `10 log10(1 / MSE)`,
/// where MSE is the fraction of differing pixels. Identical images give
/// `f64::INFINITY`.
pub fn psnr(bin: &BinaryImage, gt: &BinaryImage) -> Result<f64> {
    bin.same_dimensions(gt)?;
    let differing = bin.as_raw().iter().zip(gt.as_raw()).filter(|(a, b)| a != b).count();
    if differing == 0 {
        return Ok(f64::INFINITY);
    }
    let mse = differing as f64 / bin.as_raw().len() as f64;
    Ok(10.0 * (1.0 / mse).log10())
}

/// One method's aggregate criterion values, in criterion order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub method: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodScore {
    pub method: String,
    /// Rank per criterion; tied values share the smallest rank of their block.
    pub ranks: Vec<usize>,
    /// Sum of `ranks`; lower is better.
    pub score: usize,
    /// Position by score, with competition ties.
    pub rank: usize,
}

/// Rank-sum scores. `higher_better[k]` orients criterion `k`; NaN values rank
/// last. The result is sorted by ascending score, ties kept in input order.
pub fn rank_scores(rows: &[ScoreRow], higher_better: &[bool]) -> Result<Vec<MethodScore>> {
    if rows.len() < 2 || higher_better.is_empty() {
        return Err(Error::EmptyTable);
    }
    if let Some(bad) = rows.iter().find(|r| r.values.len() != higher_better.len()) {
        return Err(Error::InvalidParams(format!(
            "method {} has {} values for {} criteria",
            bad.method,
            bad.values.len(),
            higher_better.len()
        )));
    }
    // Oriented so that larger is always better.
    let key = |v: f64, higher: bool| match (v.is_nan(), higher) {
        (true, _) => f64::NEG_INFINITY,
        (false, true) => v,
        (false, false) => -v,
    };
    let mut scored: Vec<MethodScore> = rows
        .iter()
        .map(|row| {
            let ranks: Vec<usize> = higher_better
                .iter()
                .enumerate()
                .map(|(k, &higher)| {
                    let mine = key(row.values[k], higher);
                    1 + rows.iter().filter(|o| key(o.values[k], higher) > mine).count()
                })
                .collect();
            MethodScore {
                method: row.method.clone(),
                score: ranks.iter().sum(),
                ranks,
                rank: 0,
            }
        })
        .collect();
    let scores: Vec<usize> = scored.iter().map(|m| m.score).collect();
    for m in scored.iter_mut() {
        m.rank = 1 + scores.iter().filter(|&&s| s < m.score).count();
    }
    scored.sort_by_key(|m| m.score);
    Ok(scored)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn row(method: &str, values: &[f64]) -> ScoreRow {
        ScoreRow {
            method: method.into(),
            values: values.to_vec(),
        }
    }

    #[test]
    fn confusion_examples() {
        let gt = BinaryImage::from_fn(10, 3, |x, y| y == 1 && x < 10).unwrap();
        let c = confusion(&gt, &gt).unwrap();
        assert_eq!((c.tp, c.fp, c.fn_, c.tn), (10, 0, 0, 20));
        let blank = BinaryImage::background(10, 3).unwrap();
        let c = confusion(&blank, &gt).unwrap();
        assert_eq!((c.tp, c.fn_), (0, 10));
        assert!(confusion(&blank, &BinaryImage::background(3, 10).unwrap()).is_err());
    }

    #[test]
    fn confusion_matches_pixel_loop() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(30);
        let a = BinaryImage::from_fn(31, 17, |_, _| rng.gen_bool(0.3)).unwrap();
        let b = BinaryImage::from_fn(31, 17, |_, _| rng.gen_bool(0.3)).unwrap();
        let c = confusion(&a, &b).unwrap();
        let mut expected = [0u64; 4];
        for y in 0..17 {
            for x in 0..31 {
                let idx = (!a.is_fg(x, y) as usize) * 2 + (!b.is_fg(x, y) as usize);
                expected[idx] += 1;
            }
        }
        assert_eq!([c.tp, c.fp, c.fn_, c.tn], expected);
        assert_eq!(c.total(), 31 * 17);
    }

    #[test]
    fn f_measure_examples() {
        let perfect = Confusion {
            tp: 10,
            fp: 0,
            fn_: 0,
            tn: 5,
        };
        assert_eq!(f_measure(&perfect), 100.0);
        assert_eq!(f_measure(&Confusion { tp: 0, fp: 3, fn_: 4, tn: 1 }), 0.0);
        // R = 1, P = 0.5
        let half = Confusion {
            tp: 5,
            fp: 5,
            fn_: 0,
            tn: 0,
        };
        assert!((f_measure(&half) - 200.0 / 3.0).abs() < 1e-9);
        let swapped = Confusion { fp: 0, fn_: 5, ..half };
        assert_eq!(f_measure(&half), f_measure(&swapped));
    }

    #[test]
    fn nubn_examples() {
        assert_eq!(nubn(&BinaryImage::background(40, 40).unwrap()), 0);
        let mut one = BinaryImage::background(40, 40).unwrap();
        one.set(17, 33, true);
        assert_eq!(nubn(&one), 1);
        let half = BinaryImage::from_fn(16, 16, |x, _| x < 8).unwrap();
        assert_eq!(nubn(&half), 0);
        let off_grid = BinaryImage::from_fn(16, 16, |x, _| x < 5).unwrap();
        assert_eq!(nubn(&off_grid), 2);
        let partial = BinaryImage::from_fn(10, 3, |x, _| x == 9).unwrap();
        assert_eq!(nubn(&partial), 1);
    }

    #[test]
    fn drd_weight_matrix() {
        let w = drd_weights();
        let total: f64 = w.iter().flatten().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(w[2][2], 0.0);
        for j in 0..5 {
            for i in 0..5 {
                assert_eq!(w[j][i], w[4 - j][i]);
                assert_eq!(w[j][i], w[j][4 - i]);
                assert_eq!(w[j][i], w[i][j]);
                assert!(w[j][i] >= 0.0);
            }
        }
        assert!(w[2][1] > w[1][1] && w[1][1] > w[2][0]);
    }

    #[test]
    fn drd_single_interior_flip() {
        // Ink in the top-left block only, so NUBN = 1 away from the flip.
        let gt = BinaryImage::from_fn(32, 32, |x, y| x < 3 && y < 3).unwrap();
        assert_eq!(nubn(&gt), 1);
        let mut bin = gt.clone();
        bin.set(20, 20, true);
        assert!((drd(&bin, &gt).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(drd(&gt, &gt).unwrap(), 0.0);
    }

    #[test]
    fn drd_undefined_on_uniform_gt() {
        let gt = BinaryImage::background(16, 16).unwrap();
        assert_eq!(drd(&gt, &gt).unwrap(), 0.0);
        let mut bin = gt.clone();
        bin.set(3, 3, true);
        assert!(matches!(drd(&bin, &gt), Err(Error::UndefinedDistortion)));
    }

    #[test]
    fn psnr_examples() {
        let gt = BinaryImage::from_fn(10, 10, |x, _| x < 4).unwrap();
        assert_eq!(psnr(&gt, &gt).unwrap(), f64::INFINITY);
        let inverted = BinaryImage::from_fn(10, 10, |x, _| x >= 4).unwrap();
        assert_eq!(psnr(&inverted, &gt).unwrap(), 0.0);
        let mut one = gt.clone();
        one.set(9, 9, true);
        assert!((psnr(&one, &gt).unwrap() - 20.0).abs() < 1e-12);
    }

    #[test]
    fn rank_score_examples() {
        let rows = vec![row("a", &[1.0, 5.0]), row("b", &[1.0, 5.0])];
        let scores = rank_scores(&rows, &[true, false]).unwrap();
        assert_eq!(scores[0].score, scores[1].score);
        assert_eq!(scores[0].rank, 1);
        assert_eq!(scores[1].rank, 1);

        let rows = vec![
            row("x", &[90.0, 1.0, 10.0, 3.0]),
            row("y", &[80.0, 2.0, 12.0, 1.0]),
            row("z", &[70.0, 3.0, 11.0, 2.0]),
        ];
        let scores = rank_scores(&rows, &[true, false, true, false]).unwrap();
        let x = scores.iter().find(|m| m.method == "x").unwrap();
        assert_eq!(x.ranks, vec![1, 1, 3, 3]);
        assert_eq!(x.score, 8);
    }

    #[test]
    fn rank_score_six_method_extremes() {
        // Aggregate FM, pFM, DRD, PSNR of six methods on DIBCO 2013.
        let rows = vec![
            row("Proposed", &[87.23, 93.40, 4.16, 18.35]),
            row("Sauvola", &[85.02, 89.77, 7.58, 16.94]),
            row("Moghaddam", &[84.9, 87.41, 17.02, 8.25]),
            row("Otsu", &[80.04, 82.82, 10.98, 16.63]),
            row("Nick", &[80.02, 83.53, 12.86, 15.85]),
            row("Niblack", &[34.12, 38.01, 114.40, 6.12]),
        ];
        let scores = rank_scores(&rows, &[true, true, false, true]).unwrap();
        assert_eq!(scores.first().unwrap().method, "Proposed");
        assert_eq!(scores.first().unwrap().score, 4);
        assert_eq!(scores.last().unwrap().method, "Niblack");
        assert_eq!(scores.last().unwrap().score, 24);
    }

    #[test]
    fn rank_scores_errors_and_nan() {
        assert!(matches!(rank_scores(&[row("a", &[1.0])], &[true]), Err(Error::EmptyTable)));
        assert!(matches!(rank_scores(&[row("a", &[]), row("b", &[])], &[]), Err(Error::EmptyTable)));
        assert!(rank_scores(&[row("a", &[1.0]), row("b", &[1.0, 2.0])], &[true]).is_err());
        let scores = rank_scores(&[row("nan", &[f64::NAN]), row("ok", &[0.0])], &[false]).unwrap();
        assert_eq!(scores[0].method, "ok");
        let inf = rank_scores(&[row("a", &[f64::INFINITY]), row("b", &[f64::INFINITY])], &[true]).unwrap();
        assert_eq!(inf[0].score, inf[1].score);
    }
}
