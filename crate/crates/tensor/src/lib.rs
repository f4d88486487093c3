//! Dense f64 tensor arithmetic with reverse-mode automatic differentiation
//! and a bias-corrected Adam optimizer, sized for small MLP training.
//!
//! The programming model is define-by-run: mount plain [`Tensor`] values on a
//! [`Tape`], build the computation from the recorded primitives, then call
//! [`Tape::backward`] on a scalar root to get a gradient per grad-requiring
//! leaf. Everything runs on one thread and is deterministic given fixed
//! inputs; there is no hidden global RNG.

pub mod checkpoint;
mod error;
mod optim;
mod tape;
mod tensor;

pub use error::{Result, TensorError};
pub use optim::AdamState;
pub use tape::{Gradients, Tape, Var};
pub use tensor::Tensor;
