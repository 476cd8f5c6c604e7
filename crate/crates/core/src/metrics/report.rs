use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{confusion, drd, f_measure, pseudo_f_measure, psnr};
use crate::error::Result;
use crate::raster::BinaryImage;

/// Which metrics to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetricToggles {
    pub fm: bool,
    pub pfm: bool,
    pub drd: bool,
    pub psnr: bool,
}

impl Default for MetricToggles {
    fn default() -> Self {
        Self {
            fm: true,
            pfm: true,
            drd: true,
            psnr: true,
        }
    }
}

impl MetricToggles {
    /// Criteria in report order with their orientation (true = higher is better).
    pub fn criteria(&self) -> Vec<(&'static str, bool)> {
        [("fm", self.fm, true), ("fmp", self.pfm, true), ("drd", self.drd, false), ("psnr", self.psnr, true)]
            .into_iter()
            .filter(|c| c.1)
            .map(|(name, _, higher)| (name, higher))
            .collect()
    }
}

/// Scores of one binarized image, or a mean over several.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageScores {
    pub image: String,
    pub method: String,
    pub fm: Option<f64>,
    pub pfm: Option<f64>,
    pub drd: Option<f64>,
    /// `f64::INFINITY` when the images are identical; serialized as `"INF"`.
    #[serde(with = "inf_string")]
    pub psnr: Option<f64>,
}

impl ImageScores {
    pub fn evaluate(image: &str, method: &str, bin: &BinaryImage, gt: &BinaryImage, toggles: &MetricToggles) -> Result<Self> {
        bin.same_dimensions(gt)?;
        Ok(Self {
            image: image.to_string(),
            method: method.to_string(),
            fm: toggles.fm.then(|| confusion(bin, gt).map(|c| f_measure(&c))).transpose()?,
            pfm: toggles.pfm.then(|| pseudo_f_measure(bin, gt)).transpose()?,
            drd: toggles.drd.then(|| drd(bin, gt)).transpose()?,
            psnr: toggles.psnr.then(|| psnr(bin, gt)).transpose()?,
        })
    }

    /// Criterion values in [`MetricToggles::criteria`] order (`NaN` if absent).
    pub fn criterion_values(&self, toggles: &MetricToggles) -> Vec<f64> {
        toggles
            .criteria()
            .iter()
            .map(|(name, _)| match *name {
                "fm" => self.fm,
                "fmp" => self.pfm,
                "drd" => self.drd,
                _ => self.psnr,
            })
            .map(|v| v.unwrap_or(f64::NAN))
            .collect()
    }
}

/// Serde adapter for optional values where infinity is written as `"INF"`.
pub mod inf_string {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) if x.is_infinite() => s.serialize_str("INF"),
            Some(x) => s.serialize_f64(*x),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Option::<Raw>::deserialize(d)? {
            None => Ok(None),
            Some(Raw::Num(x)) => Ok(Some(x)),
            Some(Raw::Text(t)) if t.eq_ignore_ascii_case("inf") => Ok(Some(f64::INFINITY)),
            Some(Raw::Text(t)) => Err(serde::de::Error::custom(format!("invalid value {t:?}"))),
        }
    }
}

pub fn format_value(v: Option<f64>) -> String {
    match v {
        None => String::new(),
        Some(x) if x.is_infinite() => "INF".to_string(),
        Some(x) => format!("{x:.4}"),
    }
}

/// Per-image scores plus per-method means.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub images: Vec<ImageScores>,
    pub aggregate: Vec<ImageScores>,
}

impl EvalReport {
    /// Builds the report, averaging each method's images in first-seen method
    /// order. A mean involving an infinite PSNR is infinite.
    pub fn from_images(images: Vec<ImageScores>) -> Self {
        let mut methods: Vec<&str> = Vec::new();
        for s in &images {
            if !methods.contains(&s.method.as_str()) {
                methods.push(&s.method);
            }
        }
        let aggregate = methods
            .iter()
            .map(|&m| {
                let rows: Vec<&ImageScores> = images.iter().filter(|s| s.method == m).collect();
                let mean = |f: fn(&ImageScores) -> Option<f64>| -> Option<f64> {
                    let vals: Option<Vec<f64>> = rows.iter().map(|r| f(r)).collect();
                    vals.filter(|v| !v.is_empty()).map(|v| v.iter().sum::<f64>() / v.len() as f64)
                };
                ImageScores {
                    image: "mean".into(),
                    method: m.to_string(),
                    fm: mean(|r| r.fm),
                    pfm: mean(|r| r.pfm),
                    drd: mean(|r| r.drd),
                    psnr: mean(|r| r.psnr),
                }
            })
            .collect();
        Self { images, aggregate }
    }

    /// CSV with header `image,method,fm,pfm,drd,psnr`, per-image rows first,
    /// then the means.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("image,method,fm,pfm,drd,psnr\n");
        for s in self.images.iter().chain(&self.aggregate) {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                csv_field(&s.image),
                csv_field(&s.method),
                format_value(s.fm),
                format_value(s.pfm),
                format_value(s.drd),
                format_value(s.psnr)
            );
        }
        out
    }
}

/// Quotes a CSV field when it contains a delimiter, quote or newline.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
