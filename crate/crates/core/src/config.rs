//! JSON run configuration.
//!
//! ```json
//! {
//!   "hybrid": { "t1": 0.03, "k_smear": 8.0, "nick": { "window": 35, "k": -0.1 } },
//!   "sauvola": { "window": 15, "k": 0.5 },
//!   "metrics": { "pfm": false }
//! }
//! ```
//!
//! Every section and field is optional; missing ones take their defaults and
//! unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::hybrid::HybridParams;
use crate::local::LocalParams;
use crate::metrics::MetricToggles;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub hybrid: HybridParams,
    #[serde(default = "LocalParams::niblack")]
    pub niblack: LocalParams,
    #[serde(default = "LocalParams::sauvola")]
    pub sauvola: LocalParams,
    #[serde(default = "LocalParams::nick")]
    pub nick: LocalParams,
    #[serde(default = "LocalParams::bernsen")]
    pub bernsen: LocalParams,
    #[serde(default)]
    pub metrics: MetricToggles,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            hybrid: HybridParams::default(),
            niblack: LocalParams::niblack(),
            sauvola: LocalParams::sauvola(),
            nick: LocalParams::nick(),
            bernsen: LocalParams::bernsen(),
            metrics: MetricToggles::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.hybrid.validate()?;
        self.niblack.validate()?;
        self.sauvola.validate()?;
        self.nick.validate()?;
        self.bernsen.validate()
    }

    /// Parses and validates a JSON document.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::InvalidParams(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::FileNotFound(path.to_path_buf()),
            _ => Error::Io(e),
        })?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    /// Resolves a dotted parameter path. Paths are tried relative to
    /// `hybrid` first, so `k_smear` and `nick.window` name hybrid parameters;
    /// `sauvola.k` or `hybrid.t1` work as written.
    pub fn resolve(&self, path: &str) -> Result<String> {
        let doc = serde_json::to_value(self).expect("config serializes");
        let lookup = |p: &str| p.split('.').try_fold(&doc, |v, key| v.get(key)).is_some();
        let nested = format!("hybrid.{path}");
        if lookup(&nested) {
            Ok(nested)
        } else if lookup(path) {
            Ok(path.to_string())
        } else {
            Err(Error::InvalidParams(format!("unknown parameter {path:?}")))
        }
    }

    /// Returns a copy with one parameter replaced. `value` is parsed as JSON,
    /// falling back to a plain string (for enum values like `direct`).
    pub fn with_param(&self, path: &str, value: &str) -> Result<Self> {
        let full = self.resolve(path)?;
        let mut doc = serde_json::to_value(self).expect("config serializes");
        let mut slot = &mut doc;
        for key in full.split('.') {
            slot = slot.get_mut(key).expect("resolved path exists");
        }
        if slot.is_object() {
            return Err(Error::InvalidParams(format!("{path:?} is a section, not a parameter")));
        }
        *slot = serde_json::from_str(value).unwrap_or_else(|_| Value::String(value.to_string()));
        let cfg: Self =
            serde_json::from_value(doc).map_err(|e| Error::InvalidParams(format!("{path} = {value}: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }
}
