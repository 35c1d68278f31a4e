use std::path::PathBuf;

use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed CSV: {0}")]
    Csv(String),

    #[error("row {row}, column {column}: cannot parse {value:?} as a number")]
    Parse {
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row}, column {column}: non-finite value")]
    NonFinite { row: usize, column: String },

    #[error("missing required column {0:?}")]
    MissingColumn(String),

    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),

    #[error("empty file: no data rows")]
    Empty,

    #[error("n = {n}: sample too small (need at least {min} observations)")]
    TooSmall { n: usize, min: usize },

    #[error("asymmetric at ({a},{b}): {ab} vs {ba}")]
    Asymmetric {
        a: String,
        b: String,
        ab: f64,
        ba: f64,
    },

    #[error("nonzero diagonal at {0}")]
    NonzeroDiagonal(String),

    #[error("negative distance at ({a},{b}): {value}")]
    NegativeDistance { a: String, b: String, value: f64 },

    #[error("distance matrix is not square: {0}")]
    NotSquare(String),

    #[error("row label {row:?} does not match header label {header:?} at position {index}")]
    HeaderMismatch {
        index: usize,
        header: String,
        row: String,
    },

    #[error("label sets differ: only in dataset {only_in_dataset:?}, only in distance matrix {only_in_matrix:?}")]
    LabelMismatch {
        only_in_dataset: Vec<String>,
        only_in_matrix: Vec<String>,
    },

    #[error("mapping is not a bijection on 0..{0}")]
    NotBijective(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("design matrix is rank deficient (collinear columns)")]
    RankDeficient,

    #[error("zero variance in {0}")]
    ZeroVariance(&'static str),

    #[error("{label}: level {value} outside (0, {lmax})")]
    Domain {
        label: String,
        value: f64,
        lmax: f64,
    },

    #[error("zero off-diagonal distance between {a} and {b}")]
    ZeroDistance { a: String, b: String },

    #[error("contiguity matrix sums to zero")]
    EmptyWeights,

    #[error("invalid weight spec {0:?}")]
    InvalidWeightSpec(String),

    #[error("residuals are not standardized: sum of squares {found}, expected {expected}")]
    NotStandardized { expected: f64, found: f64 },

    #[error("residual mean {0} is not zero")]
    NonZeroMean(f64),

    #[error("negative Geary coefficient {0}")]
    NegativeGeary(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at(stage: &'static str) -> impl FnOnce(Error) -> Error {
        move |source| Error::Stage {
            stage,
            source: Box::new(source),
        }
    }

    /// True when the root cause is a filesystem failure rather than bad input.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io { .. } => true,
            Error::Stage { source, .. } => source.is_io(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
