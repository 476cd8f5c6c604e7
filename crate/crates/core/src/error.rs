use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error("corrupt image data: {0}")]
    CorruptImage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("invalid dimensions {width}x{height}: {reason}")]
    InvalidDimensions {
        width: usize,
        height: usize,
        reason: &'static str,
    },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("region {x},{y} {width}x{height} lies outside the {image_width}x{image_height} image")]
    RegionOutOfBounds {
        x: usize,
        y: usize,
        width: usize,
        height: usize,
        image_width: usize,
        image_height: usize,
    },

    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("histogram is empty")]
    EmptyHistogram,

    #[error("histogram has fewer than two populated bins")]
    DegenerateHistogram,

    #[error("ground truth contains no foreground pixels")]
    EmptyGroundTruth,

    #[error("distortion undefined: ground truth has no non-uniform blocks but images differ")]
    UndefinedDistortion,

    #[error("score table needs at least two methods and one criterion")]
    EmptyTable,
}
