//! Dataset generation and ingestion for two-view experiments: the simulated
//! nonlinear toy dataset, IDX image files, view halving, quadrant masking,
//! and the generic noise/rotation transforms.

mod digits;
mod error;
mod export;
mod gmm;
mod idx;
mod multiview;
mod toy;
mod transforms;
mod views;

pub use digits::{bundled_digits, expand_digits};
pub use error::{DataError, Result};
pub use export::{export_dataset, tensor_checksum, DatasetSidecar};
pub use gmm::{sample_gmm, GmmComponent, GmmSpec};
pub use idx::{
    load_idx, parse_idx_images, parse_idx_labels, write_idx_images, write_idx_labels, ImageSet,
    IDX_IMAGE_MAGIC, IDX_LABEL_MAGIC,
};
pub use multiview::{MultiViewDataset, SplitTag, View};
pub use toy::{
    make_toy, make_toy_with_latents, ToyProjections, TOY_LATENT_DIM, TOY_VIEW_DIM,
};
pub use transforms::{
    additive_uniform_noise, resize_image, rotate_image, shift_image, Standardizer,
};
pub use views::{half_view_dims, halve_views, mask_quadrants, reassemble, HalveAxis};
