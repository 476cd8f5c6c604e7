//! Document image binarization toolkit.
//!
//! The crate is organized the way a binarization run flows:
//!
//! - [`raster`]: gray and binary rasters, image I/O, histograms, integral
//!   images and connected-component labeling.
//! - [`enhance`]: Michelson contrast measurement and contrast-gated CLAHE.
//! - [`global`]: Otsu and two-stage multilevel Otsu (TSMO) thresholds.
//! - [`local`]: Niblack, Sauvola, Nick and Bernsen window thresholding.
//! - [`hybrid`]: contrast-category threshold selection, smear detection and
//!   the Nick second pass.
//! - [`postprocess`]: gap filling, artifact repair and component filtering.
//! - [`metrics`]: F-Measure, pseudo F-Measure, DRD, PSNR and rank scores.
//! - [`config`]: the JSON run configuration shared by the CLI and benches.

pub mod config;
pub mod enhance;
mod error;
pub mod global;
pub mod hybrid;
pub mod local;
pub mod metrics;
pub mod postprocess;
pub mod raster;

pub use config::RunConfig;
pub use enhance::{ClaheParams, ContrastReport};
pub use error::{Error, Result};
pub use global::{OtsuResult, TsmoResult};
pub use hybrid::{ContrastCategory, HybridParams, PipelineTrace, SmearMap};
pub use local::{LocalParams, WindowBackend};
pub use metrics::{Confusion, EvalReport, ImageScores};
pub use postprocess::PostprocessParams;
pub use raster::{BinaryImage, ComponentSet, GrayImage, Histogram, IntegralImages, Rect};
