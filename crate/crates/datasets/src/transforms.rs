//! Generic image and feature transforms: additive uniform noise, rotation,
//! integer shifts, and per-column standardization.

use ccalign_tensor::Tensor;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::idx::ImageSet;

/// Add i.i.d. uniform noise in [0, amplitude] to every pixel, clamping to
/// [0, 1]. Deterministic under `seed`.
pub fn additive_uniform_noise(images: &ImageSet, amplitude: f64, seed: u64) -> ImageSet {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    ImageSet {
        n: images.n,
        h: images.h,
        w: images.w,
        pixels: images
            .pixels
            .iter()
            .map(|p| (p + rng.random_range(0.0..amplitude)).clamp(0.0, 1.0))
            .collect(),
    }
}

/// Rotate a single image about its center by `degrees`, bilinear sampling,
/// zero fill outside the source.
pub fn rotate_image(img: &[f64], h: usize, w: usize, degrees: f64) -> Vec<f64> {
    let theta = degrees.to_radians();
    let (sin, cos) = theta.sin_cos();
    let (cy, cx) = ((h as f64 - 1.0) / 2.0, (w as f64 - 1.0) / 2.0);
    let mut out = vec![0.0; h * w];
    for r in 0..h {
        for c in 0..w {
            // Inverse-map the output pixel into the source image.
            let dy = r as f64 - cy;
            let dx = c as f64 - cx;
            let sy = cy + dy * cos - dx * sin;
            let sx = cx + dy * sin + dx * cos;
            out[r * w + c] = bilinear(img, h, w, sy, sx);
        }
    }
    out
}

/// Shift an image by whole pixels, zero fill.
pub fn shift_image(img: &[f64], h: usize, w: usize, dy: i64, dx: i64) -> Vec<f64> {
    let mut out = vec![0.0; h * w];
    for r in 0..h as i64 {
        for c in 0..w as i64 {
            let (sr, sc) = (r - dy, c - dx);
            if sr >= 0 && sr < h as i64 && sc >= 0 && sc < w as i64 {
                out[(r * w as i64 + c) as usize] = img[(sr * w as i64 + sc) as usize];
            }
        }
    }
    out
}

/// Resample an image to a new size with bilinear interpolation.
pub fn resize_image(
    img: &[f64],
    h: usize,
    w: usize,
    new_h: usize,
    new_w: usize,
) -> Vec<f64> {
    let mut out = vec![0.0; new_h * new_w];
    let sy = h as f64 / new_h as f64;
    let sx = w as f64 / new_w as f64;
    for r in 0..new_h {
        for c in 0..new_w {
            // Map pixel centers; offset by 0.5 keeps the grid aligned.
            let src_y = (r as f64 + 0.5) * sy - 0.5;
            let src_x = (c as f64 + 0.5) * sx - 0.5;
            out[r * new_w + c] = bilinear(img, h, w, src_y, src_x);
        }
    }
    out
}

fn bilinear(img: &[f64], h: usize, w: usize, y: f64, x: f64) -> f64 {
    if y < -1.0 || x < -1.0 || y > h as f64 || x > w as f64 {
        return 0.0;
    }
    let y0 = y.floor();
    let x0 = x.floor();
    let fy = y - y0;
    let fx = x - x0;
    let sample = |r: f64, c: f64| -> f64 {
        if r < 0.0 || c < 0.0 || r >= h as f64 || c >= w as f64 {
            0.0
        } else {
            img[r as usize * w + c as usize]
        }
    };
    let v00 = sample(y0, x0);
    let v01 = sample(y0, x0 + 1.0);
    let v10 = sample(y0 + 1.0, x0);
    let v11 = sample(y0 + 1.0, x0 + 1.0);
    v00 * (1.0 - fy) * (1.0 - fx) + v01 * (1.0 - fy) * fx + v10 * fy * (1.0 - fx) + v11 * fy * fx
}

/// Per-column affine normalization fitted on one matrix and applied to any
/// other with the same width. Columns with zero spread pass through centered.
#[derive(Clone, Debug)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(t: &Tensor) -> Self {
        let (n, d) = (t.rows(), t.cols());
        let mut mean = vec![0.0; d];
        for i in 0..n {
            for (j, v) in t.row(i).iter().enumerate() {
                mean[j] += v;
            }
        }
        for m in &mut mean {
            *m /= n as f64;
        }
        let mut var = vec![0.0; d];
        for i in 0..n {
            for (j, v) in t.row(i).iter().enumerate() {
                let c = v - mean[j];
                var[j] += c * c;
            }
        }
        let std = var
            .iter()
            .map(|v| {
                let s = (v / (n as f64 - 1.0).max(1.0)).sqrt();
                if s > 1e-12 {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        Self { mean, std }
    }

    pub fn apply(&self, t: &Tensor) -> Tensor {
        let d = t.cols();
        assert_eq!(d, self.mean.len(), "standardizer width mismatch");
        let data = t
            .data()
            .iter()
            .enumerate()
            .map(|(i, v)| (v - self.mean[i % d]) / self.std[i % d])
            .collect();
        Tensor::from_vec(t.shape().to_vec(), data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_by_zero_is_identity() {
        let img: Vec<f64> = (0..64).map(|i| i as f64 / 63.0).collect();
        let rot = rotate_image(&img, 8, 8, 0.0);
        for (a, b) in rot.iter().zip(&img) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn standardizer_zeroes_mean_and_unit_variance() {
        let t = Tensor::from_vec(vec![4, 2], vec![1.0, 10.0, 2.0, 20.0, 3.0, 30.0, 4.0, 40.0]);
        let s = Standardizer::fit(&t);
        let z = s.apply(&t);
        for j in 0..2 {
            let col: Vec<f64> = (0..4).map(|i| z.row(i)[j]).collect();
            let mean: f64 = col.iter().sum::<f64>() / 4.0;
            let var: f64 = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 3.0;
            assert!(mean.abs() < 1e-12);
            assert!((var - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn shift_moves_content() {
        let mut img = vec![0.0; 9];
        img[4] = 1.0; // center of 3x3
        let shifted = shift_image(&img, 3, 3, 1, 0);
        assert_eq!(shifted[7], 1.0);
        assert_eq!(shifted[4], 0.0);
    }
}
