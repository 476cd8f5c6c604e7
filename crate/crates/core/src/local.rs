//! Window-based thresholds: Niblack, Sauvola, Nick and Bernsen.
//!
//! Every window is centered on its pixel and clamped at the image border, so
//! margin pixels see a smaller neighborhood with its true pixel count. Means
//! and standard deviations come from [`IntegralImages`] by default; the
//! [`WindowBackend::Direct`] backend sums each window pixel by pixel and exists
//! for timing comparisons against unaccelerated implementations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{clamped_window, integral, mean_std_from_sums, window_min_max, BinaryImage, GrayImage, IntegralImages, Rect};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PixelClass {
    #[serde(alias = "fg")]
    Foreground,
    #[serde(alias = "bg")]
    Background,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowBackend {
    #[default]
    Integral,
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalParams {
    /// Odd window side length.
    pub window: usize,
    pub k: f64,
    /// Sauvola dynamic range of the standard deviation.
    #[serde(default = "default_r")]
    pub r: f64,
    #[serde(default = "default_contrast_min")]
    pub bernsen_contrast_min: u8,
    #[serde(default = "default_low_contrast_class")]
    pub bernsen_low_contrast_class: PixelClass,
    #[serde(default)]
    pub backend: WindowBackend,
}

fn default_r() -> f64 {
    128.0
}

fn default_contrast_min() -> u8 {
    15
}

fn default_low_contrast_class() -> PixelClass {
    PixelClass::Background
}

impl LocalParams {
    pub fn niblack() -> Self {
        Self::with(25, -0.2)
    }

    pub fn sauvola() -> Self {
        Self::with(15, 0.5)
    }

    pub fn nick() -> Self {
        Self::with(35, -0.1)
    }

    pub fn bernsen() -> Self {
        Self::with(31, 0.0)
    }

    pub fn with(window: usize, k: f64) -> Self {
        Self {
            window,
            k,
            r: default_r(),
            bernsen_contrast_min: default_contrast_min(),
            bernsen_low_contrast_class: default_low_contrast_class(),
            backend: WindowBackend::Integral,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.window < 3 || self.window.is_multiple_of(2) {
            return Err(Error::InvalidParams(format!("window must be odd and >= 3, got {}", self.window)));
        }
        if !self.k.is_finite() {
            return Err(Error::InvalidParams("k must be finite".into()));
        }
        if !(self.r > 0.0) || !self.r.is_finite() {
            return Err(Error::InvalidParams(format!("R must be > 0, got {}", self.r)));
        }
        Ok(())
    }
}

/// Source of window sums for one image.
pub enum WindowStats<'a> {
    Integral(IntegralImages),
    Direct(&'a GrayImage),
}

impl<'a> WindowStats<'a> {
    pub fn new(img: &'a GrayImage, backend: WindowBackend) -> Self {
        match backend {
            WindowBackend::Integral => WindowStats::Integral(integral(img)),
            WindowBackend::Direct => WindowStats::Direct(img),
        }
    }

    /// `(sum, sum of squares, count)` of the clamped window around `(x, y)`.
    #[inline]
    pub fn sums(&self, x: usize, y: usize, window: usize) -> (u64, u64, u64) {
        match self {
            WindowStats::Integral(ii) => ii.window_sums(x, y, window),
            WindowStats::Direct(img) => {
                let (x0, x1) = clamped_window(x, window, img.width());
                let (y0, y1) = clamped_window(y, window, img.height());
                let (mut s, mut q) = (0u64, 0u64);
                for yy in y0..y1 {
                    for &v in &img.as_raw()[yy * img.width() + x0..yy * img.width() + x1] {
                        let v = v as u64;
                        s += v;
                        q += v * v;
                    }
                }
                (s, q, ((x1 - x0) * (y1 - y0)) as u64)
            }
        }
    }

    #[inline]
    pub fn mean_std(&self, x: usize, y: usize, window: usize) -> (f64, f64) {
        let (s, q, n) = self.sums(x, y, window);
        mean_std_from_sums(s, q, n)
    }
}

#[inline]
pub fn niblack_threshold(mean: f64, std: f64, k: f64) -> f64 {
    mean + k * std
}

#[inline]
pub fn sauvola_threshold(mean: f64, std: f64, k: f64, r: f64) -> f64 {
    mean * (1.0 - k * (1.0 - std / r))
}

/// Nick's `m + k * sqrt(sum(p_i^2 - m^2) / NP)`; the radicand is the
/// population variance, so this coincides with Niblack's form.
#[inline]
pub fn nick_threshold(mean: f64, std: f64, k: f64) -> f64 {
    mean + k * std
}

fn threshold_region(
    img: &GrayImage,
    stats: &WindowStats<'_>,
    region: Rect,
    window: usize,
    rule: impl Fn(f64, f64) -> f64,
) -> BinaryImage {
    let mut data = Vec::with_capacity(region.area());
    for y in region.y..region.y + region.height {
        for x in region.x..region.x + region.width {
            let (m, s) = stats.mean_std(x, y, window);
            data.push(img.get(x, y) as f64 <= rule(m, s));
        }
    }
    BinaryImage::new(region.width, region.height, data).expect("region has positive area")
}

/// Per-pixel `T = m + k * s`; pixels `<= T` are foreground.
pub fn niblack(img: &GrayImage, p: &LocalParams) -> Result<BinaryImage> {
    p.validate()?;
    let stats = WindowStats::new(img, p.backend);
    Ok(threshold_region(img, &stats, img.full_rect(), p.window, |m, s| niblack_threshold(m, s, p.k)))
}

/// Per-pixel `T = m * (1 - k * (1 - s / R))`.
pub fn sauvola(img: &GrayImage, p: &LocalParams) -> Result<BinaryImage> {
    p.validate()?;
    let stats = WindowStats::new(img, p.backend);
    Ok(threshold_region(img, &stats, img.full_rect(), p.window, |m, s| {
        sauvola_threshold(m, s, p.k, p.r)
    }))
}

pub fn nick(img: &GrayImage, p: &LocalParams) -> Result<BinaryImage> {
    p.validate()?;
    let stats = WindowStats::new(img, p.backend);
    Ok(threshold_region(img, &stats, img.full_rect(), p.window, |m, s| nick_threshold(m, s, p.k)))
}

/// Nick restricted to `region`. Windows still draw on the whole image, so the
/// patch equals the matching crop of [`nick`].
pub fn nick_region(img: &GrayImage, region: Rect, p: &LocalParams) -> Result<BinaryImage> {
    let stats = WindowStats::new(img, p.backend);
    nick_region_with(img, &stats, region, p)
}

/// [`nick_region`] reusing precomputed window statistics of `img`.
pub fn nick_region_with(img: &GrayImage, stats: &WindowStats<'_>, region: Rect, p: &LocalParams) -> Result<BinaryImage> {
    p.validate()?;
    region.check_within(img.width(), img.height())?;
    Ok(threshold_region(img, stats, region, p.window, |m, s| nick_threshold(m, s, p.k)))
}

/// Bernsen: where the window contrast `max - min` reaches
/// `bernsen_contrast_min`, `T = floor((max + min) / 2)` and pixels `<= T` are
/// foreground; flatter windows assign `bernsen_low_contrast_class`.
pub fn bernsen(img: &GrayImage, p: &LocalParams) -> Result<BinaryImage> {
    p.validate()?;
    let (mins, maxs) = window_min_max(img, p.window);
    let low_is_fg = p.bernsen_low_contrast_class == PixelClass::Foreground;
    let data = img
        .as_raw()
        .iter()
        .zip(mins.iter().zip(&maxs))
        .map(|(&v, (&lo, &hi))| {
            if hi - lo < p.bernsen_contrast_min {
                low_is_fg
            } else {
                v as u16 <= (hi as u16 + lo as u16) / 2
            }
        })
        .collect();
    BinaryImage::new(img.width(), img.height(), data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_examples() {
        assert_eq!(niblack_threshold(100.0, 20.0, -0.2), 96.0);
        assert_eq!(sauvola_threshold(100.0, 64.0, 0.5, 128.0), 75.0);
        assert_eq!(sauvola_threshold(100.0, 128.0, 0.5, 128.0), 100.0);
        assert_eq!(nick_threshold(150.0, 50.0, -0.1), 145.0);
    }

    #[test]
    fn constant_image_niblack_is_all_foreground() {
        let img = GrayImage::filled(10, 10, 120).unwrap();
        assert_eq!(niblack(&img, &LocalParams::niblack()).unwrap().fg_count(), 100);
        assert_eq!(nick(&img, &LocalParams::nick()).unwrap().fg_count(), 100);
    }

    #[test]
    fn nick_two_level_window() {
        // Window {100, 100, 200, 200}: T = 150 - 0.1 * 50 = 145.
        let img = GrayImage::new(2, 2, vec![100, 200, 100, 200]).unwrap();
        let p = LocalParams::with(3, -0.1);
        let b = nick(&img, &p).unwrap();
        assert_eq!(b.as_raw(), &[true, false, true, false]);
    }

    #[test]
    fn bernsen_examples() {
        let p = LocalParams::with(3, 0.0);
        // max 200, min 100 -> T = 150
        let img = GrayImage::new(3, 1, vec![100, 150, 200]).unwrap();
        assert_eq!(bernsen(&img, &p).unwrap().as_raw(), &[true, true, false]);
        let flat = GrayImage::filled(4, 4, 60).unwrap();
        assert_eq!(bernsen(&flat, &p).unwrap().fg_count(), 0);
        let fg_low = LocalParams {
            bernsen_low_contrast_class: PixelClass::Foreground,
            ..p
        };
        assert_eq!(bernsen(&flat, &fg_low).unwrap().fg_count(), 16);
    }

    #[test]
    fn invalid_params() {
        let img = GrayImage::filled(4, 4, 1).unwrap();
        for bad in [LocalParams::with(4, -0.2), LocalParams::with(1, -0.2), LocalParams::with(3, f64::NAN)] {
            assert!(matches!(niblack(&img, &bad), Err(Error::InvalidParams(_))));
        }
        let zero_r = LocalParams { r: 0.0, ..LocalParams::sauvola() };
        assert!(sauvola(&img, &zero_r).is_err());
    }

    #[test]
    fn region_bounds_checked() {
        let img = GrayImage::filled(8, 8, 1).unwrap();
        let err = nick_region(&img, Rect::new(5, 5, 4, 1), &LocalParams::nick()).unwrap_err();
        assert!(matches!(err, Error::RegionOutOfBounds { .. }));
        assert!(nick_region(&img, Rect::new(0, 0, 0, 1), &LocalParams::nick()).is_err());
    }

    #[test]
    fn params_json_defaults() {
        let p: LocalParams = serde_json::from_str(r#"{"window": 15, "k": 0.5}"#).unwrap();
        assert_eq!(p, LocalParams::sauvola());
        assert!(serde_json::from_str::<LocalParams>(r#"{"window": 15, "k": 0.5, "bogus": 1}"#).is_err());
        let p: LocalParams =
            serde_json::from_str(r#"{"window": 3, "k": 0, "bernsen_low_contrast_class": "fg", "backend": "direct"}"#)
                .unwrap();
        assert_eq!(p.bernsen_low_contrast_class, PixelClass::Foreground);
        assert_eq!(p.backend, WindowBackend::Direct);
    }
}
