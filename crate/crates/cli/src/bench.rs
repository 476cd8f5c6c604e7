use std::fmt::Write as _;
use std::time::Instant;

use docbin_core::metrics::{csv_field, format_value, rank_scores, MetricToggles, MethodScore, ScoreRow};
use docbin_core::raster::load_gray;
use docbin_core::{BinaryImage, EvalReport, GrayImage, ImageScores, RunConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{DatasetManifest, ImagePair};
use crate::method::Method;

/// One row of the ranked report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodRow {
    pub rank: usize,
    pub score: usize,
    pub method: String,
    pub fm: Option<f64>,
    pub fmp: Option<f64>,
    pub drd: Option<f64>,
    #[serde(with = "docbin_core::metrics::inf_string")]
    pub psnr: Option<f64>,
    /// Total binarization time over the dataset.
    pub seconds: f64,
    pub mean_seconds_per_image: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageFailure {
    pub image: String,
    pub method: Option<String>,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageTiming {
    pub image: String,
    pub method: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub dataset: String,
    pub criteria: Vec<String>,
    pub methods: Vec<MethodRow>,
    pub images: Vec<ImageScores>,
    pub timings: Vec<ImageTiming>,
    pub failures: Vec<ImageFailure>,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rank,score,method,fm,fmp,drd,psnr,seconds\n");
        for r in &self.methods {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{:.6}",
                r.rank,
                r.score,
                csv_field(&r.method),
                format_value(r.fm),
                format_value(r.fmp),
                format_value(r.drd),
                format_value(r.psnr),
                r.seconds
            );
        }
        out
    }

    pub fn row(&self, method: Method) -> Option<&MethodRow> {
        self.methods.iter().find(|r| r.method == method.name())
    }
}

struct PairResult {
    scores: Vec<ImageScores>,
    timings: Vec<ImageTiming>,
    failures: Vec<ImageFailure>,
}

fn run_pair(pair: &ImagePair, methods: &[Method], cfg: &RunConfig) -> PairResult {
    let id = pair.id();
    let mut res = PairResult {
        scores: Vec::new(),
        timings: Vec::new(),
        failures: Vec::new(),
    };
    let fail = |method: Option<Method>, error: String| ImageFailure {
        image: id.clone(),
        method: method.map(|m| m.name().to_string()),
        error,
    };
    let loaded = load_gray(&pair.original).and_then(|img| {
        let gt = BinaryImage::from_gray(&load_gray(&pair.ground_truth)?, 128);
        Ok((img, gt))
    });
    let (img, gt) = match loaded {
        Ok(v) => v,
        Err(e) => {
            res.failures.push(fail(None, e.to_string()));
            return res;
        }
    };
    if img.dimensions() != gt.dimensions() {
        res.failures.push(fail(
            None,
            format!("ground truth is {:?}, image is {:?}", gt.dimensions(), img.dimensions()),
        ));
        return res;
    }
    for &m in methods {
        match score_one(&id, m, &img, &gt, cfg) {
            Ok((scores, seconds)) => {
                res.scores.push(scores);
                res.timings.push(ImageTiming {
                    image: id.clone(),
                    method: m.name().into(),
                    seconds,
                });
            }
            Err(e) => res.failures.push(fail(Some(m), e.to_string())),
        }
    }
    res
}

fn score_one(id: &str, m: Method, img: &GrayImage, gt: &BinaryImage, cfg: &RunConfig) -> docbin_core::Result<(ImageScores, f64)> {
    let start = Instant::now();
    let (mask, _) = m.run(img, cfg)?;
    let seconds = start.elapsed().as_secs_f64();
    Ok((ImageScores::evaluate(id, m.name(), &mask, gt, &cfg.metrics)?, seconds))
}

/// Runs every method on every pair. Pairs may run concurrently; results are
/// assembled in manifest order, so metric columns do not depend on
/// scheduling. Seconds are the summed per-image binarization times.
pub fn run_bench(manifest: &DatasetManifest, methods: &[Method], cfg: &RunConfig) -> BenchReport {
    let results: Vec<PairResult> = manifest.pairs.par_iter().map(|p| run_pair(p, methods, cfg)).collect();
    let mut images = Vec::new();
    let mut timings = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        images.extend(r.scores);
        timings.extend(r.timings);
        failures.extend(r.failures);
    }
    // An image that failed under any method is excluded for all of them, so
    // the means compare methods on the same pages.
    let failed: Vec<&str> = failures.iter().map(|f| f.image.as_str()).collect();
    images.retain(|s| !failed.contains(&s.image.as_str()));
    timings.retain(|t| !failed.contains(&t.image.as_str()));

    let toggles = cfg.metrics;
    let report = EvalReport::from_images(images);
    let rows = rank_methods(&report, methods, &toggles, &timings);
    BenchReport {
        dataset: manifest.name.clone(),
        criteria: toggles.criteria().iter().map(|c| c.0.to_string()).collect(),
        methods: rows,
        images: report.images,
        timings,
        failures,
    }
}

fn rank_methods(report: &EvalReport, methods: &[Method], toggles: &MetricToggles, timings: &[ImageTiming]) -> Vec<MethodRow> {
    let mean_of = |m: Method| report.aggregate.iter().find(|a| a.method == m.name());
    let score_rows: Vec<ScoreRow> = methods
        .iter()
        .map(|&m| ScoreRow {
            method: m.name().into(),
            values: mean_of(m)
                .map(|a| a.criterion_values(toggles))
                .unwrap_or_else(|| vec![f64::NAN; toggles.criteria().len()]),
        })
        .collect();
    let higher: Vec<bool> = toggles.criteria().iter().map(|c| c.1).collect();
    let ranked: Vec<MethodScore> = if score_rows.len() >= 2 && !higher.is_empty() {
        rank_scores(&score_rows, &higher).expect("rows are well formed")
    } else {
        score_rows
            .iter()
            .map(|r| MethodScore {
                method: r.method.clone(),
                ranks: vec![1; higher.len()],
                score: higher.len(),
                rank: 1,
            })
            .collect()
    };
    ranked
        .into_iter()
        .map(|s| {
            let agg = report.aggregate.iter().find(|a| a.method == s.method);
            let times: Vec<f64> = timings.iter().filter(|t| t.method == s.method).map(|t| t.seconds).collect();
            let seconds: f64 = times.iter().sum();
            MethodRow {
                rank: s.rank,
                score: s.score,
                fm: agg.and_then(|a| a.fm),
                fmp: agg.and_then(|a| a.pfm),
                drd: agg.and_then(|a| a.drd),
                psnr: agg.and_then(|a| a.psnr),
                seconds,
                mean_seconds_per_image: if times.is_empty() { 0.0 } else { seconds / times.len() as f64 },
                method: s.method,
            }
        })
        .collect()
}
