use std::fmt;
use std::str::FromStr;

use docbin_core::global::{apply_threshold, otsu, tsmo};
use docbin_core::hybrid::binarize;
use docbin_core::local::{bernsen, niblack, nick, sauvola};
use docbin_core::raster::histogram;
use docbin_core::{BinaryImage, GrayImage, PipelineTrace, Result, RunConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Otsu,
    Tsmo,
    Niblack,
    Sauvola,
    Nick,
    Bernsen,
    Hybrid,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Otsu,
        Method::Tsmo,
        Method::Niblack,
        Method::Sauvola,
        Method::Nick,
        Method::Bernsen,
        Method::Hybrid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Otsu => "otsu",
            Method::Tsmo => "tsmo",
            Method::Niblack => "niblack",
            Method::Sauvola => "sauvola",
            Method::Nick => "nick",
            Method::Bernsen => "bernsen",
            Method::Hybrid => "hybrid",
        }
    }

    /// Binarizes `img`. Only `hybrid` produces a trace. `tsmo` applies the
    /// lower threshold `t_o1`. A single-level image is all background under
    /// the global methods.
    pub fn run(self, img: &GrayImage, cfg: &RunConfig) -> Result<(BinaryImage, Option<PipelineTrace>)> {
        let mask = match self {
            Method::Otsu => {
                let r = otsu(&histogram(img))?;
                if r.degenerate {
                    BinaryImage::background(img.width(), img.height())?
                } else {
                    apply_threshold(img, r.threshold)
                }
            }
            Method::Tsmo => {
                let hist = histogram(img);
                if hist.populated_bins() < 2 {
                    BinaryImage::background(img.width(), img.height())?
                } else {
                    apply_threshold(img, tsmo(&hist, cfg.hybrid.tsmo_groups)?.t_o1)
                }
            }
            Method::Niblack => niblack(img, &cfg.niblack)?,
            Method::Sauvola => sauvola(img, &cfg.sauvola)?,
            Method::Nick => nick(img, &cfg.nick)?,
            Method::Bernsen => bernsen(img, &cfg.bernsen)?,
            Method::Hybrid => {
                let (mask, trace) = binarize(img, &cfg.hybrid)?;
                return Ok((mask, Some(trace)));
            }
        };
        Ok((mask, None))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let names: Vec<&str> = Method::ALL.iter().map(|m| m.name()).collect();
                format!("unknown method {s:?}; expected one of {}", names.join(", "))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert_eq!("OTSU".parse::<Method>().unwrap(), Method::Otsu);
        assert!("otsu2".parse::<Method>().is_err());
    }

    #[test]
    fn constant_image_is_blank_for_every_method() {
        let img = GrayImage::filled(12, 12, 90).unwrap();
        let cfg = RunConfig::default();
        for m in [Method::Otsu, Method::Tsmo, Method::Bernsen, Method::Hybrid] {
            assert_eq!(m.run(&img, &cfg).unwrap().0.fg_count(), 0, "{m}");
        }
    }

    #[test]
    fn only_hybrid_traces() {
        let img = GrayImage::from_fn(40, 40, |x, _| if x % 5 == 0 { 30 } else { 200 }).unwrap();
        let cfg = RunConfig::default();
        assert!(Method::Hybrid.run(&img, &cfg).unwrap().1.is_some());
        assert!(Method::Sauvola.run(&img, &cfg).unwrap().1.is_none());
    }
}
