use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("invalid mixture spec: {0}")]
    InvalidSpec(String),

    #[error("paired views disagree: X has {x_rows} rows, Y has {y_rows}")]
    RowMismatch { x_rows: usize, y_rows: usize },

    #[error("labels length {labels} does not match {rows} rows")]
    LabelMismatch { labels: usize, rows: usize },

    #[error("{path}: bad IDX magic at byte {offset}: expected {expected:#010x}, got {got:#010x}")]
    BadMagic {
        path: String,
        offset: usize,
        expected: u32,
        got: u32,
    },

    #[error("{path}: truncated IDX file at byte {offset}: need {need} more bytes")]
    Truncated {
        path: String,
        offset: usize,
        need: usize,
    },

    #[error("image/label counts disagree: {images} images vs {labels} labels")]
    CountMismatch { images: usize, labels: usize },

    #[error("images must be square with an even side, got {h}x{w}")]
    OddSide { h: usize, w: usize },

    #[error("view length {len} does not match {h}x{w}")]
    ViewShape { len: usize, h: usize, w: usize },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Tensor(#[from] ccalign_tensor::TensorError),
}

pub type Result<T> = std::result::Result<T, DataError>;
