use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("{what}: row counts differ ({a} vs {b})")]
    RowMismatch {
        what: &'static str,
        a: usize,
        b: usize,
    },

    #[error("{what}: shape mismatch ({a:?} vs {b:?})")]
    ShapeMismatch {
        what: &'static str,
        a: Vec<usize>,
        b: Vec<usize>,
    },

    #[error("{what}: need at least {min} samples, got {got}")]
    TooFewSamples {
        what: &'static str,
        min: usize,
        got: usize,
    },

    #[error("bandwidth must be positive, got {0}")]
    BadBandwidth(f64),

    #[error("self-HSIC is zero (constant input); dependence is undefined")]
    ZeroSelfHsic,

    #[error("embedding row {row} has zero norm; angles are undefined")]
    ZeroNormRow { row: usize },

    #[error("k must satisfy 1 <= k < n, got k={k}, n={n}")]
    BadNeighborCount { k: usize, n: usize },

    #[error("train split contains a single class; cannot fit a classifier")]
    SingleClassTrain,

    #[error("k-means needs k <= n, got k={k}, n={n}")]
    BadClusterCount { k: usize, n: usize },

    #[error("non-finite metric value for `{0}`")]
    NonFinite(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, MetricError>;
