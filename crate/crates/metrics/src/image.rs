//! Image-quality metrics: pixel accuracy (1 − RMSE), PSNR, SSIM over 8×8
//! non-overlapping windows, and gradient-magnitude sharpness.

use crate::error::{MetricError, Result};

/// 1 − RMSE over pixels in [0, 1]; 1.0 for identical images.
pub fn pixel_accuracy(pred: &[f64], truth: &[f64]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(MetricError::ShapeMismatch {
            what: "pixel_accuracy",
            a: vec![pred.len()],
            b: vec![truth.len()],
        });
    }
    let mse = pred
        .iter()
        .zip(truth)
        .map(|(p, t)| (p - t) * (p - t))
        .sum::<f64>()
        / pred.len() as f64;
    Ok(1.0 - mse.sqrt())
}

/// 10·log10(max_val² / MSE) in dB; +∞ when the images are identical.
pub fn psnr(pred: &[f64], truth: &[f64], max_val: f64) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(MetricError::ShapeMismatch {
            what: "psnr",
            a: vec![pred.len()],
            b: vec![truth.len()],
        });
    }
    let mse = pred
        .iter()
        .zip(truth)
        .map(|(p, t)| (p - t) * (p - t))
        .sum::<f64>()
        / pred.len() as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (max_val * max_val / mse).log10())
}

const SSIM_K1: f64 = 0.01;
const SSIM_K2: f64 = 0.03;
const SSIM_WINDOW: usize = 8;

/// Mean SSIM over non-overlapping 8×8 windows with k1 = 0.01, k2 = 0.03 and
/// dynamic range 1.0. Symmetric in its arguments bit-for-bit.
pub fn ssim(pred: &[f64], truth: &[f64], h: usize, w: usize) -> Result<f64> {
    if pred.len() != truth.len() || pred.len() != h * w {
        return Err(MetricError::ShapeMismatch {
            what: "ssim",
            a: vec![pred.len()],
            b: vec![h * w],
        });
    }
    let c1 = (SSIM_K1 * 1.0_f64).powi(2);
    let c2 = (SSIM_K2 * 1.0_f64).powi(2);
    let mut total = 0.0;
    let mut windows = 0usize;
    let mut r0 = 0;
    while r0 < h {
        let r1 = (r0 + SSIM_WINDOW).min(h);
        let mut c0 = 0;
        while c0 < w {
            let c1_end = (c0 + SSIM_WINDOW).min(w);
            let n = ((r1 - r0) * (c1_end - c0)) as f64;
            let mut ma = 0.0;
            let mut mb = 0.0;
            for r in r0..r1 {
                for c in c0..c1_end {
                    ma += pred[r * w + c];
                    mb += truth[r * w + c];
                }
            }
            ma /= n;
            mb /= n;
            let mut va = 0.0;
            let mut vb = 0.0;
            let mut cov = 0.0;
            for r in r0..r1 {
                for c in c0..c1_end {
                    let da = pred[r * w + c] - ma;
                    let db = truth[r * w + c] - mb;
                    va += da * da;
                    vb += db * db;
                    cov += da * db;
                }
            }
            let denom = (n - 1.0).max(1.0);
            va /= denom;
            vb /= denom;
            cov /= denom;
            total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2))
                / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            windows += 1;
            c0 = c1_end;
        }
        r0 = r1;
    }
    Ok(total / windows as f64)
}

/// Mean magnitude of forward-difference gradients, pooling the horizontal
/// and vertical differences; 0 for a constant image.
pub fn sharpness(img: &[f64], h: usize, w: usize) -> Result<f64> {
    if img.len() != h * w {
        return Err(MetricError::ShapeMismatch {
            what: "sharpness",
            a: vec![img.len()],
            b: vec![h * w],
        });
    }
    let mut total = 0.0;
    let mut count = 0usize;
    for r in 0..h {
        for c in 0..w {
            if c + 1 < w {
                total += (img[r * w + c + 1] - img[r * w + c]).abs();
                count += 1;
            }
            if r + 1 < h {
                total += (img[(r + 1) * w + c] - img[r * w + c]).abs();
                count += 1;
            }
        }
    }
    if count == 0 {
        return Ok(0.0);
    }
    Ok(total / count as f64)
}
