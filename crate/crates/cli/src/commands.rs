use std::path::{Path, PathBuf};
use std::time::Instant;

use docbin_core::raster::{load_gray, save_binary};
use docbin_core::{BinaryImage, ImageScores, RunConfig};

use crate::bench::{run_bench, BenchReport};
use crate::dataset::DatasetManifest;
use crate::method::Method;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Loads `path` (or the defaults) and applies `key=value` overrides.
pub fn load_config(path: Option<&Path>, overrides: &[String]) -> Result<RunConfig, CliError> {
    let mut cfg = match path {
        Some(p) => RunConfig::load(p).map_err(|e| match e {
            docbin_core::Error::InvalidParams(m) => CliError::Usage(m),
            other => CliError::from(other),
        })?,
        None => RunConfig::default(),
    };
    for item in overrides {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("expected key=value, got {item:?}")))?;
        cfg = cfg.with_param(key.trim(), value.trim()).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    Ok(cfg)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Path of the trace written next to `out`: `page.png` -> `page.trace.json`.
pub fn trace_path(out: &Path) -> PathBuf {
    out.with_extension("trace.json")
}

pub fn binarize(input: &Path, method: Method, cfg: &RunConfig, out: &Path, trace: bool) -> Result<(), CliError> {
    let img = load_gray(input)?;
    let (mask, pipeline) = method.run(&img, cfg)?;
    save_binary(&mask, out)?;
    if trace {
        let json = match pipeline {
            Some(t) => serde_json::to_string_pretty(&t),
            None => serde_json::to_string_pretty(&serde_json::json!({ "method": method.name() })),
        }
        .expect("trace serializes");
        write_file(&trace_path(out), &json)?;
    }
    Ok(())
}

pub fn evaluate(pred: &Path, gt: &Path, cfg: &RunConfig, format: Format) -> Result<String, CliError> {
    let bin = BinaryImage::from_gray(&load_gray(pred)?, 128);
    let truth = BinaryImage::from_gray(&load_gray(gt)?, 128);
    let id = pred.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let scores = ImageScores::evaluate(&id, "input", &bin, &truth, &cfg.metrics)?;
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(&scores).expect("scores serialize") + "\n",
        Format::Csv => docbin_core::EvalReport {
            images: vec![scores],
            aggregate: Vec::new(),
        }
        .to_csv(),
    })
}

fn render(report: &BenchReport, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(report).expect("report serializes") + "\n",
        Format::Csv => report.to_csv(),
    }
}

/// Format from the report extension, falling back to `fallback`.
pub fn format_for(path: Option<&Path>, fallback: Format) -> Format {
    match path.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
        Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
        _ => fallback,
    }
}

/// Runs the bench and returns the rendered report. Failed images are
/// reported on stderr and turn into [`CliError::PartialFailure`] after the
/// report has been written.
pub fn bench(
    dataset: &Path,
    gt_suffix: &str,
    methods: &[Method],
    cfg: &RunConfig,
    report: Option<&Path>,
    format: Format,
) -> Result<(BenchReport, String), CliError> {
    if methods.is_empty() {
        return Err(CliError::Usage("no methods requested".into()));
    }
    let manifest = DatasetManifest::discover(dataset, gt_suffix)?;
    let result = run_bench(&manifest, methods, cfg);
    let text = render(&result, format_for(report, format));
    if let Some(path) = report {
        write_file(path, &text)?;
    }
    for f in &result.failures {
        eprintln!(
            "failed: {} ({}): {}",
            f.image,
            f.method.as_deref().unwrap_or("load"),
            f.error
        );
    }
    Ok((result, text))
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SweepRow {
    pub value: String,
    pub fm: Option<f64>,
    pub seconds: f64,
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("value,fm,seconds\n");
    for r in rows {
        let fm = r.fm.map(|v| format!("{v:.4}")).unwrap_or_default();
        out.push_str(&format!("{},{},{:.6}\n", docbin_core::metrics::csv_field(&r.value), fm, r.seconds));
    }
    out
}

/// One bench run per value of `param`, reporting mean FM and total seconds.
pub fn sweep(
    dataset: &Path,
    gt_suffix: &str,
    method: Method,
    cfg: &RunConfig,
    param: &str,
    values: &[String],
) -> Result<(Vec<SweepRow>, usize), CliError> {
    if values.is_empty() {
        return Err(CliError::Usage("no sweep values given".into()));
    }
    let configs = values
        .iter()
        .map(|v| cfg.with_param(param, v).map_err(|e| CliError::Usage(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    let manifest = DatasetManifest::discover(dataset, gt_suffix)?;
    let mut failures = 0;
    let mut rows = Vec::new();
    for (value, c) in values.iter().zip(&configs) {
        let start = Instant::now();
        let report = run_bench(&manifest, &[method], c);
        let row = report.row(method);
        failures += report.failures.len();
        rows.push(SweepRow {
            value: value.clone(),
            fm: row.and_then(|r| r.fm),
            seconds: row.map(|r| r.seconds).unwrap_or_else(|| start.elapsed().as_secs_f64()),
        });
    }
    Ok((rows, failures))
}
