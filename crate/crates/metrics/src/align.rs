//! Misalignment degree of paired embeddings: per-pair angle at the origin,
//! normalized by the maximum pair angle and averaged. δ = 0 when every pair
//! coincides in direction (defined as 0 when the max angle is 0), δ = 1 when
//! a single pair carries the only nonzero angle.

use ccalign_tensor::Tensor;

use crate::error::{MetricError, Result};

pub fn misalignment_degree(zx: &Tensor, zy: &Tensor) -> Result<f64> {
    let n = zx.rows();
    if zy.rows() != n || zx.cols() != zy.cols() {
        return Err(MetricError::ShapeMismatch {
            what: "misalignment_degree",
            a: zx.shape().to_vec(),
            b: zy.shape().to_vec(),
        });
    }
    if n == 0 {
        return Err(MetricError::TooFewSamples {
            what: "misalignment_degree",
            min: 1,
            got: 0,
        });
    }
    let mut angles = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b) = (zx.row(i), zy.row(i));
        let dot: f64 = a.iter().zip(b).map(|(u, v)| u * v).sum();
        let na: f64 = a.iter().map(|v| v * v).sum::<f64>().sqrt();
        let nb: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        if na == 0.0 || nb == 0.0 {
            return Err(MetricError::ZeroNormRow { row: i });
        }
        // Identical vectors must give an exact zero angle; the quotient
        // below would leave rounding noise at the 1e-8 scale.
        if a == b {
            angles.push(0.0);
        } else {
            angles.push((dot / (na * nb)).clamp(-1.0, 1.0).acos());
        }
    }
    let max_angle = angles.iter().cloned().fold(0.0_f64, f64::max);
    if max_angle == 0.0 {
        return Ok(0.0);
    }
    Ok(angles.iter().map(|a| a / max_angle).sum::<f64>() / n as f64)
}
