use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("sample has no valid surface positions")]
    DegenerateSample,

    #[error("layer block of {l} layers requested but only {layers} layers exist")]
    InvalidL { l: usize, layers: usize },

    #[error("patch window contains no copyable layer pixels")]
    EmptyPatch,

    #[error("no background space for the patch")]
    NoSpace,

    #[error("scale factor must be positive, got {0}")]
    NonPositiveFactor(f64),

    #[error("affine scale {0} is too close to zero")]
    SingularTransform(f64),

    #[error("no evaluable columns for surface {0}")]
    NoValidColumns(usize),

    #[error("empty list")]
    EmptyList,

    #[error("subject mismatch: {0}")]
    SubjectMismatch(String),

    #[error("corrupt header in {path}: {reason}")]
    CorruptHeader { path: PathBuf, reason: String },

    #[error("truncated payload in {path}: expected {expected} bytes, found {found}")]
    TruncatedPayload {
        path: PathBuf,
        expected: u64,
        found: u64,
    },

    #[error("infeasible phantom spec: {0}")]
    InfeasibleSpec(String),

    #[error("slice {index} out of range (volume has {count} slices)")]
    SliceOutOfRange { index: usize, count: usize },

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("{count} validation problem(s) in {path}")]
    ValidationFailed { path: PathBuf, count: usize },

    #[error("config error in {path}: {reason}")]
    Config { path: PathBuf, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
}

impl Error {
    /// Stable error name, printed by the CLI.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::DegenerateSample => "DegenerateSample",
            Error::InvalidL { .. } => "InvalidL",
            Error::EmptyPatch => "EmptyPatch",
            Error::NoSpace => "NoSpace",
            Error::NonPositiveFactor(_) => "NonPositiveFactor",
            Error::SingularTransform(_) => "SingularTransform",
            Error::NoValidColumns(_) => "NoValidColumns",
            Error::EmptyList => "EmptyList",
            Error::SubjectMismatch(_) => "SubjectMismatch",
            Error::CorruptHeader { .. } => "CorruptHeader",
            Error::TruncatedPayload { .. } => "TruncatedPayload",
            Error::InfeasibleSpec(_) => "InfeasibleSpec",
            Error::SliceOutOfRange { .. } => "SliceOutOfRange",
            Error::InvalidValue(_) => "InvalidValue",
            Error::ValidationFailed { .. } => "ValidationFailed",
            Error::Config { .. } => "ConfigError",
            Error::Io { .. } => "IoError",
            Error::Json { .. } => "JsonError",
            Error::Image { .. } => "ImageError",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }
}
