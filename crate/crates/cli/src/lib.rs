//! Batch front end for the binarization toolkit: the `docbin` binary's
//! subcommands as library functions, plus dataset discovery and reports.

pub mod bench;
pub mod commands;
pub mod dataset;
pub mod method;

pub use bench::{run_bench, BenchReport, MethodRow};
pub use dataset::{DatasetManifest, ImagePair};
pub use method::Method;

/// A failed command, carrying its process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad arguments or configuration: exit 1.
    #[error("{0}")]
    Usage(String),
    /// Unreadable or unwritable files, missing datasets, mismatched pairs: exit 2.
    #[error("{0}")]
    Io(String),
    /// Failure inside an algorithm: exit 3.
    #[error("{0}")]
    Processing(String),
    /// Some bench images failed and were excluded: exit 4.
    #[error("{0} image(s) failed and were excluded")]
    PartialFailure(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Processing(_) => 3,
            CliError::PartialFailure(_) => 4,
        }
    }
}

impl From<docbin_core::Error> for CliError {
    fn from(e: docbin_core::Error) -> Self {
        use docbin_core::Error as E;
        match e {
            E::FileNotFound(_) | E::UnsupportedFormat(_) | E::CorruptImage(_) | E::Io(_) | E::DimensionMismatch { .. } => {
                CliError::Io(e.to_string())
            }
            E::InvalidParams(_) => CliError::Usage(e.to_string()),
            other => CliError::Processing(other.to_string()),
        }
    }
}
