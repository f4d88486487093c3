//! Bundled handwritten digit corpus for offline image experiments.
//!
//! The crate ships the UCI optical-digits test corpus (1797 labelled 8×8
//! grayscale images, the same copy scikit-learn distributes) as IDX files.
//! [`expand_digits`] upsamples them to 28×28 and applies seeded rotation and
//! shift jitter to synthesize splits of any size, so the full image pipeline
//! (IDX ingestion, view halving, masking) runs without a network fetch.
//! Base digits are partitioned between train and test pools before
//! augmentation, so the splits never share a source image.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::Result;
use crate::idx::{parse_idx_images, parse_idx_labels, ImageSet};
use crate::transforms::{resize_image, rotate_image, shift_image};

static DIGIT_IMAGE_BYTES: &[u8] = include_bytes!("../assets/digits-images-idx3-ubyte");
static DIGIT_LABEL_BYTES: &[u8] = include_bytes!("../assets/digits-labels-idx1-ubyte");

/// Number of base digits reserved for the train pool; the remainder feeds
/// the test pool.
const TRAIN_POOL: usize = 1500;

pub fn bundled_digits() -> Result<(ImageSet, Vec<u8>)> {
    let images = parse_idx_images(DIGIT_IMAGE_BYTES, "bundled digits images")?;
    let labels = parse_idx_labels(DIGIT_LABEL_BYTES, "bundled digits labels")?;
    Ok((images, labels))
}

/// Synthesize `n_train`/`n_test` labelled 28×28 digit images from the
/// bundled corpus. Deterministic under `seed`.
pub fn expand_digits(
    n_train: usize,
    n_test: usize,
    seed: u64,
) -> Result<((ImageSet, Vec<u8>), (ImageSet, Vec<u8>))> {
    let (base, labels) = bundled_digits()?;
    let train = expand_pool(&base, &labels, 0..TRAIN_POOL, n_train, seed)?;
    let test = expand_pool(&base, &labels, TRAIN_POOL..base.n, n_test, seed ^ 0x9e37_79b9)?;
    Ok((train, test))
}

fn expand_pool(
    base: &ImageSet,
    labels: &[u8],
    pool: std::ops::Range<usize>,
    n: usize,
    seed: u64,
) -> Result<(ImageSet, Vec<u8>)> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let side = 28;
    let mut pixels = Vec::with_capacity(n * side * side);
    let mut out_labels = Vec::with_capacity(n);
    for _ in 0..n {
        let idx = rng.random_range(pool.clone());
        let big = resize_image(base.image(idx), base.h, base.w, side, side);
        let angle = rng.random_range(-12.0..12.0);
        let rotated = rotate_image(&big, side, side, angle);
        let dy = rng.random_range(-2i64..=2);
        let dx = rng.random_range(-2i64..=2);
        let shifted = shift_image(&rotated, side, side, dy, dx);
        pixels.extend(shifted.into_iter().map(|p| p.clamp(0.0, 1.0)));
        out_labels.push(labels[idx]);
    }
    Ok((
        ImageSet {
            n,
            h: side,
            w: side,
            pixels,
        },
        out_labels,
    ))
}
