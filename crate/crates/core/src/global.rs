//! Global thresholds: Otsu and two-stage multilevel Otsu (TSMO).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{BinaryImage, GrayImage, Histogram};

/// Stage-one grouping used by TSMO unless configured otherwise.
pub const DEFAULT_TSMO_GROUPS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OtsuResult {
    pub threshold: u8,
    pub between_class_variance: f64,
    /// Set when all mass sits in a single bin; `threshold` is then that bin.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TsmoResult {
    pub t_o1: u8,
    pub t_o2: u8,
    pub between_class_variance: f64,
}

/// Cumulative pixel counts and intensity sums, `cum[t]` covering bins `0..=t`.
struct Cumulative {
    count: [u64; 256],
    sum: [u64; 256],
}

impl Cumulative {
    fn new(hist: &Histogram) -> Self {
        let mut count = [0u64; 256];
        let mut sum = [0u64; 256];
        let (mut c, mut s) = (0u64, 0u64);
        for (v, &n) in hist.bins().iter().enumerate() {
            c += n;
            s += n * v as u64;
            count[v] = c;
            sum[v] = s;
        }
        Self { count, sum }
    }

    fn total(&self) -> (u64, u64) {
        (self.count[255], self.sum[255])
    }

    /// Count and sum of bins `lo..=hi`, where `lo` may be one past `hi`.
    fn range(&self, lo: usize, hi: usize) -> (u64, u64) {
        if lo > hi {
            return (0, 0);
        }
        if lo == 0 {
            (self.count[hi], self.sum[hi])
        } else {
            (self.count[hi] - self.count[lo - 1], self.sum[hi] - self.sum[lo - 1])
        }
    }

    fn two_class(&self, t: usize) -> f64 {
        let (n, s) = self.total();
        let (n0, s0) = self.range(0, t);
        two_class_variance(n0, s0, n - n0, s - s0)
    }

    fn three_class(&self, t1: usize, t2: usize) -> f64 {
        let (n, s) = self.total();
        let classes = [self.range(0, t1), self.range(t1 + 1, t2), self.range(t2 + 1, 255)];
        three_class_variance(&classes, n, s)
    }
}

/// `w0 * w1 * (mu0 - mu1)^2` from class counts and intensity sums.
/// Zero when either class is empty.
#[inline]
pub fn two_class_variance(n0: u64, s0: u64, n1: u64, s1: u64) -> f64 {
    if n0 == 0 || n1 == 0 {
        return 0.0;
    }
    let n = (n0 + n1) as f64;
    let w0 = n0 as f64 / n;
    let w1 = n1 as f64 / n;
    let mu0 = s0 as f64 / n0 as f64;
    let mu1 = s1 as f64 / n1 as f64;
    w0 * w1 * (mu0 - mu1) * (mu0 - mu1)
}

/// `sum_k w_k * (mu_k - mu_T)^2` over `(count, sum)` classes; empty classes
/// contribute nothing.
#[inline]
pub fn three_class_variance(classes: &[(u64, u64); 3], n: u64, s: u64) -> f64 {
    let mu_t = s as f64 / n as f64;
    classes
        .iter()
        .filter(|(nk, _)| *nk > 0)
        .map(|&(nk, sk)| {
            let d = sk as f64 / nk as f64 - mu_t;
            nk as f64 / n as f64 * d * d
        })
        .sum()
}

/// Otsu's threshold: the smallest `t` maximizing the between-class variance
/// of `{p <= t}` versus `{p > t}`, scanning every `t` in `0..=255`.
pub fn otsu(hist: &Histogram) -> Result<OtsuResult> {
    if hist.is_empty() {
        return Err(Error::EmptyHistogram);
    }
    if hist.populated_bins() == 1 {
        let bin = hist.bins().iter().position(|&c| c > 0).unwrap_or(0);
        return Ok(OtsuResult {
            threshold: bin as u8,
            between_class_variance: 0.0,
            degenerate: true,
        });
    }
    let cum = Cumulative::new(hist);
    let mut best = (0usize, f64::NEG_INFINITY);
    for t in 0..256 {
        let v = cum.two_class(t);
        if v > best.1 {
            best = (t, v);
        }
    }
    Ok(OtsuResult {
        threshold: best.0 as u8,
        between_class_variance: best.1,
        degenerate: false,
    })
}

/// Two-stage multilevel Otsu producing `t_o1 < t_o2`.
///
/// Stage one groups the histogram into `groups` equal-width groups and finds
/// the pair of group boundaries maximizing the three-class between-class
/// variance. Stage two searches every bin pair within the winning groups
/// widened by two groups on each side, or across the populated range when
/// fewer than three groups hold pixels. Classes are `{p <= t_o1}`,
/// `{t_o1 < p <= t_o2}` and `{p > t_o2}`; ties go to the smallest `t_o1`,
/// then the smallest `t_o2`.
pub fn tsmo(hist: &Histogram, groups: usize) -> Result<TsmoResult> {
    if !(2..=256).contains(&groups) || 256 % groups != 0 {
        return Err(Error::InvalidParams(format!(
            "TSMO group count must divide 256 and be at least 2, got {groups}"
        )));
    }
    if hist.populated_bins() < 2 {
        return Err(Error::DegenerateHistogram);
    }
    let cum = Cumulative::new(hist);
    let width = 256 / groups;
    let boundary = |g: usize| (g + 1) * width - 1;

    let mut coarse = (0usize, 1usize, f64::NEG_INFINITY);
    for g1 in 0..groups {
        for g2 in g1 + 1..groups {
            let v = cum.three_class(boundary(g1), boundary(g2));
            if v > coarse.2 {
                coarse = (g1, g2, v);
            }
        }
    }

    let span = |g: usize| (g.saturating_sub(2) * width, ((g + 3) * width).min(256) - 1);
    let populated_groups = hist.bins().chunks(width).filter(|g| g.iter().any(|&c| c > 0)).count();
    let ((lo1, hi1), (lo2, hi2)) = if populated_groups < 3 {
        // Grouped classes cannot separate three modes; search the populated span.
        let first = hist.bins().iter().position(|&c| c > 0).unwrap_or(0);
        let last = hist.bins().iter().rposition(|&c| c > 0).unwrap_or(255);
        ((first, last), (first, last.max(first + 1).min(255)))
    } else {
        (span(coarse.0), span(coarse.1))
    };
    let mut best = (0usize, 0usize, f64::NEG_INFINITY);
    for t1 in lo1..=hi1 {
        for t2 in lo2.max(t1 + 1)..=hi2 {
            let v = cum.three_class(t1, t2);
            if v > best.2 {
                best = (t1, t2, v);
            }
        }
    }
    Ok(TsmoResult {
        t_o1: best.0 as u8,
        t_o2: best.1 as u8,
        between_class_variance: best.2,
    })
}

/// Pixels `<= t` become foreground.
pub fn apply_threshold(img: &GrayImage, t: u8) -> BinaryImage {
    let data = img.as_raw().iter().map(|&p| p <= t).collect();
    BinaryImage::new(img.width(), img.height(), data).expect("dimensions come from a valid image")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::histogram;

    fn hist_from(pairs: &[(usize, u64)]) -> Histogram {
        let mut bins = [0u64; 256];
        for &(v, c) in pairs {
            bins[v] += c;
        }
        Histogram::from_bins(bins)
    }

    #[test]
    fn otsu_bimodal_plateau_picks_smallest() {
        let r = otsu(&hist_from(&[(50, 100), (200, 100)])).unwrap();
        assert_eq!(r.threshold, 50);
        assert!(!r.degenerate);
        // w0 = w1 = 1/2, (mu0 - mu1)^2 = 150^2
        assert_eq!(r.between_class_variance, 0.25 * 150.0 * 150.0);
    }

    #[test]
    fn otsu_extremes() {
        assert_eq!(otsu(&hist_from(&[(0, 10), (255, 10)])).unwrap().threshold, 0);
    }

    #[test]
    fn otsu_single_bin_is_flagged() {
        let r = otsu(&histogram(&GrayImage::filled(3, 3, 7).unwrap())).unwrap();
        assert_eq!((r.threshold, r.between_class_variance, r.degenerate), (7, 0.0, true));
    }

    #[test]
    fn otsu_empty_histogram() {
        assert!(matches!(otsu(&Histogram::from_bins([0; 256])), Err(Error::EmptyHistogram)));
    }

    #[test]
    fn tsmo_trimodal() {
        let r = tsmo(&hist_from(&[(30, 50), (120, 50), (220, 50)]), 32).unwrap();
        assert_eq!((r.t_o1, r.t_o2), (30, 120));
    }

    #[test]
    fn tsmo_two_bins() {
        let r = tsmo(&hist_from(&[(0, 10), (255, 10)]), 32).unwrap();
        assert_eq!((r.t_o1, r.t_o2), (0, 1));
    }

    #[test]
    fn tsmo_modes_within_one_group() {
        // All mass inside bins 24..=31: no coarse boundary separates it.
        let h = hist_from(&[(25, 40), (28, 40), (31, 40)]);
        let r = tsmo(&h, 32).unwrap();
        assert_eq!((r.t_o1, r.t_o2), (25, 28));
    }

    #[test]
    fn tsmo_errors() {
        let constant = histogram(&GrayImage::filled(4, 4, 9).unwrap());
        assert!(matches!(tsmo(&constant, 32), Err(Error::DegenerateHistogram)));
        let h = hist_from(&[(0, 1), (9, 1)]);
        assert!(matches!(tsmo(&h, 3), Err(Error::InvalidParams(_))));
        assert!(matches!(tsmo(&h, 1), Err(Error::InvalidParams(_))));
        assert!(tsmo(&h, 256).is_ok());
    }

    #[test]
    fn apply_threshold_examples() {
        let img = GrayImage::new(2, 1, vec![10, 200]).unwrap();
        assert_eq!(apply_threshold(&img, 50).as_raw(), &[true, false]);
        assert_eq!(apply_threshold(&img, 255).fg_count(), 2);
        let flat = GrayImage::filled(3, 3, 100).unwrap();
        assert_eq!(apply_threshold(&flat, 99).fg_count(), 0);
    }
}
