//! Squared maximum mean discrepancy with the Gaussian kernel
//! exp(−‖u−v‖²/(2σ²)). The unbiased estimator drops the diagonal terms and
//! may go slightly negative; the biased variant keeps them so that
//! mmd2_biased(A, A) is exactly zero.

use ccalign_tensor::Tensor;

use crate::error::{MetricError, Result};
use crate::kernels::sq_dist;

fn check(a: &Tensor, b: &Tensor, sigma: f64) -> Result<()> {
    if sigma <= 0.0 {
        return Err(MetricError::BadBandwidth(sigma));
    }
    if a.cols() != b.cols() {
        return Err(MetricError::ShapeMismatch {
            what: "mmd2",
            a: a.shape().to_vec(),
            b: b.shape().to_vec(),
        });
    }
    if a.rows() < 2 || b.rows() < 2 {
        return Err(MetricError::TooFewSamples {
            what: "mmd2",
            min: 2,
            got: a.rows().min(b.rows()),
        });
    }
    Ok(())
}

fn kernel_sums(a: &Tensor, b: &Tensor, sigma: f64) -> (f64, f64, f64, f64, f64) {
    let gamma = 1.0 / (2.0 * sigma * sigma);
    let (n, m) = (a.rows(), b.rows());
    let mut kaa_off = 0.0; // off-diagonal sum within A
    let mut kbb_off = 0.0;
    let mut kab = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            kaa_off += (-gamma * sq_dist(a.row(i), a.row(j))).exp();
        }
    }
    for i in 0..m {
        for j in (i + 1)..m {
            kbb_off += (-gamma * sq_dist(b.row(i), b.row(j))).exp();
        }
    }
    for i in 0..n {
        for j in 0..m {
            kab += (-gamma * sq_dist(a.row(i), b.row(j))).exp();
        }
    }
    (kaa_off * 2.0, kbb_off * 2.0, kab, n as f64, m as f64)
}

/// Unbiased estimator; expectation is 0 when the distributions agree.
pub fn mmd2_unbiased(a: &Tensor, b: &Tensor, sigma: f64) -> Result<f64> {
    check(a, b, sigma)?;
    let (kaa, kbb, kab, n, m) = kernel_sums(a, b, sigma);
    Ok(kaa / (n * (n - 1.0)) + kbb / (m * (m - 1.0)) - 2.0 * kab / (n * m))
}

/// Biased estimator including diagonal terms; exactly 0 for identical sets.
pub fn mmd2_biased(a: &Tensor, b: &Tensor, sigma: f64) -> Result<f64> {
    check(a, b, sigma)?;
    let (kaa, kbb, kab, n, m) = kernel_sums(a, b, sigma);
    // Diagonals contribute k(u,u) = 1 each.
    Ok((kaa + n) / (n * n) + (kbb + m) / (m * m) - 2.0 * kab / (n * m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha12Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn normal(rng: &mut ChaCha12Rng, n: usize, mean: f64) -> Tensor {
        Tensor::from_vec(
            vec![n, 1],
            (0..n)
                .map(|_| {
                    let v: f64 = StandardNormal.sample(rng);
                    v + mean
                })
                .collect(),
        )
    }

    #[test]
    fn biased_mmd_of_identical_sets_is_zero() {
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let a = normal(&mut rng, 200, 0.0);
        let v = mmd2_biased(&a, &a, 1.0).unwrap();
        assert!(v.abs() < 1e-12, "{v}");
    }

    #[test]
    fn unbiased_mmd_is_near_zero_for_equal_distributions() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let a = normal(&mut rng, 10_000, 0.0);
        let b = normal(&mut rng, 10_000, 0.0);
        let v = mmd2_unbiased(&a, &b, 1.0).unwrap();
        // Std error of the estimator at this size is well under 1e-3.
        assert!(v.abs() < 3e-3, "{v}");
    }

    #[test]
    fn separated_gaussians_match_closed_form() {
        // For N(0,1) vs N(μ,1) with kernel width σ: E k(u,u') over
        // independent pairs is σ/√(σ²+2)·exp(−μ²/(2(σ²+2))), so
        // MMD² = 2/√3·(1 − e^{−25/6}) ≈ 1.1368 at μ=5, σ=1.
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let a = normal(&mut rng, 10_000, 0.0);
        let b = normal(&mut rng, 10_000, 5.0);
        let v = mmd2_unbiased(&a, &b, 1.0).unwrap();
        let expected = 2.0 / 3.0_f64.sqrt() * (1.0 - (-25.0_f64 / 6.0).exp());
        assert!((v - expected).abs() < 0.02, "{v} vs {expected}");
    }

    #[test]
    fn unbiased_mean_over_resamples_is_within_three_stderr_of_zero() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let mut samples = Vec::with_capacity(50);
        for _ in 0..50 {
            let a = normal(&mut rng, 250, 0.0);
            let b = normal(&mut rng, 250, 0.0);
            samples.push(mmd2_unbiased(&a, &b, 1.0).unwrap());
        }
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        let stderr = (var / n).sqrt();
        assert!(
            mean.abs() <= 3.0 * stderr,
            "mean {mean} vs stderr {stderr}"
        );
    }

    #[test]
    fn non_positive_bandwidth_is_rejected() {
        let a = Tensor::from_vec(vec![2, 1], vec![0.0, 1.0]);
        assert!(matches!(
            mmd2_unbiased(&a, &a, 0.0),
            Err(MetricError::BadBandwidth(_))
        ));
    }
}
