use std::path::PathBuf;

/// Errors produced by the analysis core.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("degenerate threshold: predicate has no intervals")]
    DegenerateThreshold,

    #[error("malformed interval [{lo}, {hi}]")]
    MalformedInterval { lo: f64, hi: f64 },

    #[error("structuring element side must be odd and >= 1, got {0}")]
    InvalidKernel(usize),

    #[error("dimension mismatch: expected {expected:?}, got {actual:?}")]
    DimensionMismatch {
        expected: (u32, u32),
        actual: (u32, u32),
    },

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("no foreground pixels")]
    NoForeground,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("underdetermined fit: {distinct} distinct time values for degree {degree}")]
    UnderdeterminedFit { degree: usize, distinct: usize },

    #[error("degenerate R²: observed values have zero variance")]
    DegenerateRSquared,

    #[error("degenerate table: {0}")]
    DegenerateTable(String),

    #[error("line {line}: field `{field}`: {message}")]
    Record {
        line: usize,
        field: String,
        message: String,
    },

    #[error("line {line}: {count} entr{} with confidence outside [0, 1]", if *.count == 1 { "y" } else { "ies" })]
    ConfidenceOutOfRange { line: usize, count: usize },

    #[error("image universes differ; unmatched images: {}", .0.join(", "))]
    MismatchedImages(Vec<String>),

    #[error("empty ground truth: {0}")]
    EmptyGroundTruth(String),

    #[error("failed to read image {path}: {source}")]
    ImageRead {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
