//! View-splitting and masking transforms for image datasets.

use ccalign_tensor::Tensor;

use crate::error::{DataError, Result};
use crate::idx::ImageSet;
use crate::multiview::{MultiViewDataset, SplitTag};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HalveAxis {
    LeftRight,
    TopBottom,
}

/// Split each square image into two flattened halves: X takes the first half
/// (left or top), Y the second. Reassembling the halves reproduces the image
/// bit-exactly.
pub fn halve_views(
    images: &ImageSet,
    axis: HalveAxis,
    labels: Option<&[u8]>,
    split: SplitTag,
) -> Result<MultiViewDataset> {
    let (h, w) = (images.h, images.w);
    if h != w || h % 2 != 0 {
        return Err(DataError::OddSide { h, w });
    }
    let half = h * w / 2;
    let mut x = Vec::with_capacity(images.n * half);
    let mut y = Vec::with_capacity(images.n * half);
    for i in 0..images.n {
        let img = images.image(i);
        match axis {
            HalveAxis::LeftRight => {
                for r in 0..h {
                    x.extend_from_slice(&img[r * w..r * w + w / 2]);
                    y.extend_from_slice(&img[r * w + w / 2..(r + 1) * w]);
                }
            }
            HalveAxis::TopBottom => {
                x.extend_from_slice(&img[..half]);
                y.extend_from_slice(&img[half..]);
            }
        }
    }
    MultiViewDataset::new(
        Tensor::from_vec(vec![images.n, half], x),
        Tensor::from_vec(vec![images.n, half], y),
        labels.map(|l| l.iter().map(|v| *v as i64).collect()),
        split,
    )
}

/// Dimensions of one halved view for a `side × side` image.
pub fn half_view_dims(side: usize, axis: HalveAxis) -> (usize, usize) {
    match axis {
        HalveAxis::LeftRight => (side, side / 2),
        HalveAxis::TopBottom => (side / 2, side),
    }
}

/// Reassemble a full image from its two flattened halves.
pub fn reassemble(x_half: &[f64], y_half: &[f64], side: usize, axis: HalveAxis) -> Vec<f64> {
    let mut img = vec![0.0; side * side];
    match axis {
        HalveAxis::LeftRight => {
            let hw = side / 2;
            for r in 0..side {
                img[r * side..r * side + hw].copy_from_slice(&x_half[r * hw..(r + 1) * hw]);
                img[r * side + hw..(r + 1) * side]
                    .copy_from_slice(&y_half[r * hw..(r + 1) * hw]);
            }
        }
        HalveAxis::TopBottom => {
            img[..side * side / 2].copy_from_slice(x_half);
            img[side * side / 2..].copy_from_slice(y_half);
        }
    }
    img
}

/// Replace the pixels of the selected quadrants with `fill`. Quadrants are
/// numbered 1..=4 row-major (1 top-left, 2 top-right, 3 bottom-left,
/// 4 bottom-right); the split lines sit at ⌈h/2⌉ and ⌈w/2⌉. An empty set is
/// the identity.
pub fn mask_quadrants(
    view: &[f64],
    h: usize,
    w: usize,
    quadrants: &[u8],
    fill: f64,
) -> Result<Vec<f64>> {
    if view.len() != h * w {
        return Err(DataError::ViewShape {
            len: view.len(),
            h,
            w,
        });
    }
    let (hs, ws) = (h.div_ceil(2), w.div_ceil(2));
    let mut out = view.to_vec();
    for q in quadrants {
        let (r0, r1, c0, c1) = match q {
            1 => (0, hs, 0, ws),
            2 => (0, hs, ws, w),
            3 => (hs, h, 0, ws),
            4 => (hs, h, ws, w),
            other => {
                return Err(DataError::InvalidSpec(format!(
                    "quadrant {other} outside 1..=4"
                )))
            }
        };
        for r in r0..r1 {
            for c in c0..c1 {
                out[r * w + c] = fill;
            }
        }
    }
    Ok(out)
}
