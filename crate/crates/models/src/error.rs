use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid MLP spec: {0}")]
    InvalidSpec(String),

    #[error("covariance is singular with ridge 0; pass a ridge epsilon > 0")]
    SingularCovariance,

    #[error("EM E-step produced a non positive-definite system at iteration {iter}")]
    NonPdCovariance { iter: usize },

    #[error("{what} expects dimension {expected}, got {got}")]
    DimMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("batch has {batch} rows but {prior} prior samples")]
    PriorBatchMismatch { batch: usize, prior: usize },

    #[error(transparent)]
    Tensor(#[from] ccalign_tensor::TensorError),

    #[error(transparent)]
    Data(#[from] ccalign_datasets::DataError),
}

pub type Result<T> = std::result::Result<T, ModelError>;
