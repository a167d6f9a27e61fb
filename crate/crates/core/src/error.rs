use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: unsupported format: {reason}")]
    UnsupportedFormat { path: PathBuf, reason: String },

    #[error("{path}: channel count ≠ 1 (found {channels})")]
    ChannelCount { path: PathBuf, channels: usize },

    #[error("{path}: maxval ≠ 255 (found {maxval})")]
    MaxVal { path: PathBuf, maxval: u32 },

    #[error("malformed image data: {0}")]
    Malformed(String),

    #[error("image {width}x{height} is smaller than the {min_width}x{min_height} stencil")]
    ImageTooSmall {
        width: usize,
        height: usize,
        min_width: usize,
        min_height: usize,
    },

    #[error("{} image(s) failed to load", failures.len())]
    ImagesFailed { failures: Vec<Error> },

    #[error("manifest {path}: {reason}")]
    Manifest { path: PathBuf, reason: String },

    #[error("feature length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty feature vector")]
    EmptyFeature,

    #[error("empty gallery")]
    EmptyGallery,

    #[error("empty probe set")]
    EmptyProbeSet,

    #[error("rank k = {k} out of range 1..={gallery}")]
    RankOutOfRange { k: usize, gallery: usize },

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("reference and optimized kernels disagree for {0}")]
    OracleMismatch(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures caused by the filesystem rather than by bad input.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io { .. } => true,
            Error::Csv(e) => e.is_io_error(),
            Error::ImagesFailed { failures } => failures.iter().any(Error::is_io),
            _ => false,
        }
    }
}
