use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("non-finite value at training step {step}: {source}")]
    NonFiniteAtStep {
        step: usize,
        source: ccalign_tensor::TensorError,
    },

    #[error("{what} expects {expected} columns, got {got}")]
    DimMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error(transparent)]
    Model(#[from] ccalign_models::ModelError),

    #[error(transparent)]
    Tensor(#[from] ccalign_tensor::TensorError),

    #[error(transparent)]
    Metric(#[from] ccalign_metrics::MetricError),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, TrainError>;
