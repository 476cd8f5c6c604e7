use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::CliError;

const EXTENSIONS: [&str; 7] = ["png", "pgm", "pbm", "ppm", "bmp", "tif", "tiff"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImagePair {
    pub original: PathBuf,
    pub ground_truth: PathBuf,
}

impl ImagePair {
    /// File stem of the original, used as the image id in reports.
    pub fn id(&self) -> String {
        self.original
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub name: String,
    pub pairs: Vec<ImagePair>,
}

fn is_image(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| EXTENSIONS.iter().any(|x| x.eq_ignore_ascii_case(e)))
}

fn strip_suffix_ci<'a>(stem: &'a str, suffix: &str) -> Option<&'a str> {
    let cut = stem.len().checked_sub(suffix.len())?;
    (stem.is_char_boundary(cut) && stem[cut..].eq_ignore_ascii_case(suffix)).then(|| &stem[..cut])
}

impl DatasetManifest {
    /// Pairs every image under `dir` with the image in the same directory whose
    /// stem is the original's stem plus `gt_suffix` (case-insensitive, any
    /// supported extension). Pairs are sorted by original path.
    pub fn discover(dir: &Path, gt_suffix: &str) -> Result<Self, CliError> {
        if !dir.is_dir() {
            return Err(CliError::Io(format!("dataset directory not found: {}", dir.display())));
        }
        let files: Vec<PathBuf> = WalkDir::new(dir)
            .sort_by_file_name()
            .into_iter()
            .filter_map(|e| e.ok())
            .filter(|e| e.file_type().is_file() && is_image(e.path()))
            .map(|e| e.into_path())
            .collect();
        let stem = |p: &Path| p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let mut pairs = Vec::new();
        for gt in &files {
            let gt_stem = stem(gt);
            let Some(base) = strip_suffix_ci(&gt_stem, gt_suffix) else {
                continue;
            };
            if base.is_empty() {
                continue;
            }
            let original = files.iter().find(|f| {
                f.parent() == gt.parent() && *f != gt && stem(f).eq_ignore_ascii_case(base)
            });
            if let Some(original) = original {
                pairs.push(ImagePair {
                    original: original.clone(),
                    ground_truth: gt.clone(),
                });
            }
        }
        pairs.sort_by(|a, b| a.original.cmp(&b.original));
        pairs.dedup_by(|a, b| a.original == b.original);
        if pairs.is_empty() {
            return Err(CliError::Io(format!(
                "no image/ground-truth pairs with suffix {gt_suffix:?} under {}",
                dir.display()
            )));
        }
        let name = dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| dir.display().to_string());
        Ok(Self { name, pairs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suffix_matching() {
        assert_eq!(strip_suffix_ci("PR01_gt", "_GT"), Some("PR01"));
        assert_eq!(strip_suffix_ci("PR01", "_GT"), None);
        assert_eq!(strip_suffix_ci("gt", "_GT"), None);
    }

    #[test]
    fn discovers_pairs_across_extensions_and_case() {
        let dir = tempfile::tempdir().unwrap();
        let sub = dir.path().join("set");
        std::fs::create_dir(&sub).unwrap();
        for name in ["a.png", "a_GT.pgm", "b.bmp", "B_gt.png", "c.png", "notes.txt", "d_GT.png"] {
            std::fs::write(sub.join(name), b"").unwrap();
        }
        let m = DatasetManifest::discover(dir.path(), "_GT").unwrap();
        let ids: Vec<String> = m.pairs.iter().map(|p| p.id()).collect();
        assert_eq!(ids, vec!["a", "b"]);
        assert!(m.pairs[0].ground_truth.ends_with("a_GT.pgm"));
    }

    #[test]
    fn empty_directory_is_an_io_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(DatasetManifest::discover(dir.path(), "_GT"), Err(CliError::Io(_))));
        assert!(matches!(
            DatasetManifest::discover(&dir.path().join("missing"), "_GT"),
            Err(CliError::Io(_))
        ));
    }
}
