//! The hybrid binarization stage.
//!
//! 1. Contrast-gated CLAHE on the gray input.
//! 2. The average local contrast of the working image picks one of four
//!    categories, and each category picks a global threshold:
//!    Low uses TSMO's upper threshold, Medium uses Otsu, High uses TSMO's
//!    lower threshold, and Fuzzy chooses between Otsu and TSMO's upper
//!    threshold by checking the gap between them and the population of the
//!    band they enclose.
//! 3. The globally thresholded mask is cut into square segments; segments
//!    whose ink frequency is an outlier (`f > m + k * s`) are treated as smear
//!    and re-binarized with Nick, using windows over the full image.
//!
//! [`binarize`] adds the morphological post-processing pass on top.

use serde::{Deserialize, Serialize};

use crate::enhance::{gate_and_enhance, local_average_contrast, ClaheParams};
use crate::error::{Error, Result};
use crate::global::{apply_threshold, otsu, tsmo, OtsuResult, TsmoResult, DEFAULT_TSMO_GROUPS};
use crate::local::{nick_region_with, LocalParams, WindowStats};
use crate::postprocess::{postprocess, PostprocessParams};
use crate::raster::{histogram, BinaryImage, GrayImage, Histogram, Rect};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HybridParams {
    /// Upper bound of the Low category.
    pub t1: f64,
    /// Upper bound of the Fuzzy category.
    pub t2: f64,
    /// Upper bound of the Medium category.
    pub t3: f64,
    /// Smallest accepted `|T_O2 - T_O|` in the Fuzzy rule.
    pub d_min: u8,
    /// Largest accepted `|T_O2 - T_O|` in the Fuzzy rule.
    pub d_max: u8,
    /// Fraction bounding the band `T_O < p <= T_O2` against the population
    /// `p <= T_O` in the Fuzzy rule. Configured as a fraction: 0.5 means 50%.
    pub p: f64,
    /// Smear-detection sensitivity.
    pub k_smear: f64,
    /// Side of the square smear-detection segments, in pixels.
    pub segment: usize,
    pub tsmo_groups: usize,
    /// Nick parameters for the second pass over smear segments.
    pub nick: LocalParams,
    /// CLAHE runs when the average local contrast is below this value.
    pub t_ctr: f64,
    pub clahe: ClaheParams,
    /// Component-filter factor of the post-processing pass.
    pub lambda: f64,
    /// Run the post-processing pass in [`binarize`].
    pub postprocess: bool,
}

impl Default for HybridParams {
    fn default() -> Self {
        Self {
            t1: 0.03,
            t2: 0.04,
            t3: 0.085,
            d_min: 5,
            d_max: 25,
            p: 0.5,
            k_smear: 8.0,
            segment: 35,
            tsmo_groups: DEFAULT_TSMO_GROUPS,
            nick: LocalParams::nick(),
            t_ctr: 0.02,
            clahe: ClaheParams::default(),
            lambda: 15.0,
            postprocess: true,
        }
    }
}

impl HybridParams {
    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidParams(msg));
        if !(0.0 < self.t1 && self.t1 < self.t2 && self.t2 < self.t3 && self.t3 < 1.0) {
            return invalid(format!(
                "contrast cut-points must satisfy 0 < t1 < t2 < t3 < 1, got {}, {}, {}",
                self.t1, self.t2, self.t3
            ));
        }
        if self.d_min > self.d_max {
            return invalid(format!("d_min {} exceeds d_max {}", self.d_min, self.d_max));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return invalid(format!("p must lie in [0, 1], got {}", self.p));
        }
        if !self.k_smear.is_finite() {
            return invalid("k_smear must be finite".into());
        }
        if self.segment < 8 {
            return invalid(format!("smear segment must be at least 8 px, got {}", self.segment));
        }
        if self.tsmo_groups < 2 || self.tsmo_groups > 256 || 256 % self.tsmo_groups != 0 {
            return invalid(format!("tsmo_groups must divide 256, got {}", self.tsmo_groups));
        }
        if !(self.t_ctr > 0.0 && self.t_ctr < 1.0) {
            return invalid(format!("t_ctr must lie in (0, 1), got {}", self.t_ctr));
        }
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return invalid(format!("lambda must be > 0, got {}", self.lambda));
        }
        self.nick.validate()?;
        self.clahe.validate()
    }

    pub fn postprocess_params(&self) -> PostprocessParams {
        PostprocessParams { lambda: self.lambda }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContrastCategory {
    Low,
    Fuzzy,
    Medium,
    High,
}

/// `Low` up to `t1`, `Fuzzy` up to `t2`, `Medium` up to `t3`, `High` above;
/// every upper bound is inclusive.
pub fn classify_contrast(ctr: f64, p: &HybridParams) -> ContrastCategory {
    if ctr <= p.t1 {
        ContrastCategory::Low
    } else if ctr <= p.t2 {
        ContrastCategory::Fuzzy
    } else if ctr <= p.t3 {
        ContrastCategory::Medium
    } else {
        ContrastCategory::High
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSelection {
    pub threshold: u8,
    pub otsu: OtsuResult,
    /// Absent when the histogram is degenerate.
    pub tsmo: Option<TsmoResult>,
    /// Outcome of the Fuzzy-category rule, when it ran.
    pub fuzzy_rule_passed: Option<bool>,
    pub degenerate: bool,
}

/// The Fuzzy-category rule: accept `T_O2` when
/// `d_min <= |T_O2 - T_O| <= d_max` and the band `T_O < p <= T_O2` holds at
/// most `p` times the pixels at or below `T_O`.
pub fn fuzzy_prefers_upper(hist: &Histogram, t_o: u8, t_o2: u8, p: &HybridParams) -> bool {
    let gap = t_o2.abs_diff(t_o);
    let band = hist.count_between(t_o, t_o2) as f64;
    let dark = hist.count_at_most(t_o) as f64;
    p.d_min <= gap && gap <= p.d_max && band <= p.p * dark
}

pub fn select_global_threshold(hist: &Histogram, cat: ContrastCategory, p: &HybridParams) -> Result<ThresholdSelection> {
    let otsu = otsu(hist)?;
    if otsu.degenerate {
        return Ok(ThresholdSelection {
            threshold: otsu.threshold,
            otsu,
            tsmo: None,
            fuzzy_rule_passed: None,
            degenerate: true,
        });
    }
    let multi = tsmo(hist, p.tsmo_groups)?;
    let mut fuzzy_rule_passed = None;
    // Two gray levels cannot fill three classes; TSMO then leaves a class
    // empty and its thresholds carry no information.
    let bilevel = hist.populated_bins() < 3;
    let threshold = match cat {
        _ if bilevel => otsu.threshold,
        ContrastCategory::Low => multi.t_o2,
        ContrastCategory::Medium => otsu.threshold,
        ContrastCategory::High => multi.t_o1,
        ContrastCategory::Fuzzy => {
            let upper = fuzzy_prefers_upper(hist, otsu.threshold, multi.t_o2, p);
            fuzzy_rule_passed = Some(upper);
            if upper {
                multi.t_o2
            } else {
                otsu.threshold
            }
        }
    };
    Ok(ThresholdSelection {
        threshold,
        otsu,
        tsmo: Some(multi),
        fuzzy_rule_passed,
        degenerate: false,
    })
}

/// Per-segment ink frequencies and outlier flags.
///
/// Segments tile the image row by row; the last column and row may be
/// narrower.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmearMap {
    pub segment: usize,
    pub cols: usize,
    pub rows: usize,
    pub width: usize,
    pub height: usize,
    /// Foreground fraction of each segment.
    pub frequencies: Vec<f64>,
    pub flags: Vec<bool>,
    pub mean: f64,
    pub std: f64,
}

impl SmearMap {
    pub fn tile(&self, col: usize, row: usize) -> Rect {
        let x = col * self.segment;
        let y = row * self.segment;
        Rect::new(x, y, self.segment.min(self.width - x), self.segment.min(self.height - y))
    }

    pub fn is_suspicious(&self, col: usize, row: usize) -> bool {
        self.flags[row * self.cols + col]
    }

    pub fn suspicious_count(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    pub fn suspicious_tiles(&self) -> impl Iterator<Item = Rect> + '_ {
        (0..self.rows)
            .flat_map(move |r| (0..self.cols).map(move |c| (c, r)))
            .filter(|&(c, r)| self.is_suspicious(c, r))
            .map(|(c, r)| self.tile(c, r))
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }
}

/// Flags segments whose foreground fraction exceeds `m + k_smear * s`, with
/// `m` and `s` the mean and population standard deviation of the fractions.
pub fn detect_smear(bin: &BinaryImage, p: &HybridParams) -> Result<SmearMap> {
    if p.segment < 8 {
        return Err(Error::InvalidParams(format!("smear segment must be at least 8 px, got {}", p.segment)));
    }
    let (w, h) = bin.dimensions();
    let seg = p.segment;
    let cols = w.div_ceil(seg);
    let rows = h.div_ceil(seg);
    let mut counts = vec![0usize; cols * rows];
    for y in 0..h {
        let row = (y / seg) * cols;
        for (x, &fg) in bin.as_raw()[y * w..(y + 1) * w].iter().enumerate() {
            if fg {
                counts[row + x / seg] += 1;
            }
        }
    }
    let mut map = SmearMap {
        segment: seg,
        cols,
        rows,
        width: w,
        height: h,
        frequencies: Vec::with_capacity(cols * rows),
        flags: vec![false; cols * rows],
        mean: 0.0,
        std: 0.0,
    };
    for r in 0..rows {
        for c in 0..cols {
            map.frequencies.push(counts[r * cols + c] as f64 / map.tile(c, r).area() as f64);
        }
    }
    let n = map.frequencies.len() as f64;
    let mean = map.frequencies.iter().sum::<f64>() / n;
    let var = map.frequencies.iter().map(|f| (f - mean) * (f - mean)).sum::<f64>() / n;
    map.mean = mean;
    map.std = var.sqrt();

    let first = map.frequencies[0];
    if map.frequencies.iter().all(|&f| f == first) {
        // Identical frequencies: nothing can be an outlier, whatever the rounding of m.
        map.std = 0.0;
        return Ok(map);
    }
    let cutoff = mean + p.k_smear * map.std;
    for (flag, &f) in map.flags.iter_mut().zip(&map.frequencies) {
        *flag = f > cutoff;
    }
    Ok(map)
}

/// What the pipeline decided for one image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineTrace {
    /// Average local contrast of the input image.
    pub input_contrast: f64,
    pub enhanced: bool,
    /// Average local contrast of the working image used for classification.
    pub contrast: f64,
    pub category: ContrastCategory,
    pub otsu_threshold: u8,
    pub tsmo_thresholds: Option<(u8, u8)>,
    pub fuzzy_rule_passed: Option<bool>,
    /// Global threshold applied before the smear pass.
    pub threshold: u8,
    pub degenerate: bool,
    pub suspicious_tiles: usize,
    pub total_tiles: usize,
    pub postprocessed: bool,
}

/// Enhancement, category-driven global threshold and the Nick second pass on
/// smear segments. A degenerate (single-level) working image yields an
/// all-background mask.
pub fn hybrid_binarize(img: &GrayImage, p: &HybridParams) -> Result<(BinaryImage, PipelineTrace)> {
    p.validate()?;
    let (work, report) = gate_and_enhance(img, p.t_ctr, &p.clahe)?;
    let contrast = if report.enhanced {
        local_average_contrast(&work, p.clahe.epsilon)
    } else {
        report.local_avg_contrast
    };
    let category = classify_contrast(contrast, p);
    let hist = histogram(&work);
    let selection = select_global_threshold(&hist, category, p)?;

    let mut trace = PipelineTrace {
        input_contrast: report.local_avg_contrast,
        enhanced: report.enhanced,
        contrast,
        category,
        otsu_threshold: selection.otsu.threshold,
        tsmo_thresholds: selection.tsmo.map(|t| (t.t_o1, t.t_o2)),
        fuzzy_rule_passed: selection.fuzzy_rule_passed,
        threshold: selection.threshold,
        degenerate: selection.degenerate,
        suspicious_tiles: 0,
        total_tiles: 0,
        postprocessed: false,
    };
    if selection.degenerate {
        return Ok((BinaryImage::background(img.width(), img.height())?, trace));
    }

    let mut mask = apply_threshold(&work, selection.threshold);
    let smear = detect_smear(&mask, p)?;
    trace.total_tiles = smear.len();
    trace.suspicious_tiles = smear.suspicious_count();
    if trace.suspicious_tiles > 0 {
        let stats = WindowStats::new(&work, p.nick.backend);
        for tile in smear.suspicious_tiles() {
            let patch = nick_region_with(&work, &stats, tile, &p.nick)?;
            mask.paste(tile, &patch)?;
        }
    }
    Ok((mask, trace))
}

/// The full pipeline: [`hybrid_binarize`] followed by post-processing when
/// `p.postprocess` is set.
pub fn binarize(img: &GrayImage, p: &HybridParams) -> Result<(BinaryImage, PipelineTrace)> {
    let (mask, mut trace) = hybrid_binarize(img, p)?;
    if !p.postprocess || trace.degenerate {
        return Ok((mask, trace));
    }
    trace.postprocessed = true;
    Ok((postprocess(&mask, &p.postprocess_params()), trace))
}
