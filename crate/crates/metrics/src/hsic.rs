//! Normalized HSIC. The biased estimator trace(K H L H)/(N−1)² is used for
//! both the cross term and the self-normalization; since H is idempotent the
//! ratio reduces to a cosine between the doubly-centered gram matrices, which
//! pins nhsic(Z, Z) to exactly 1.

use ccalign_tensor::Tensor;

use crate::error::{MetricError, Result};
use crate::kernels::KernelSpec;

fn double_center(k: &mut [f64], n: usize) {
    let mut row_mean = vec![0.0; n];
    let mut total = 0.0;
    for i in 0..n {
        let mut s = 0.0;
        for j in 0..n {
            s += k[i * n + j];
        }
        row_mean[i] = s / n as f64;
        total += s;
    }
    let grand = total / (n * n) as f64;
    for i in 0..n {
        for j in 0..n {
            k[i * n + j] += grand - row_mean[i] - row_mean[j];
        }
    }
}

/// HSIC(A, B) / sqrt(HSIC(A, A) · HSIC(B, B)) with the biased trace
/// estimator. Result lies in [0, 1].
pub fn nhsic(za: &Tensor, zb: &Tensor, kernel: &KernelSpec) -> Result<f64> {
    let n = za.rows();
    if n != zb.rows() {
        return Err(MetricError::RowMismatch {
            what: "nhsic",
            a: n,
            b: zb.rows(),
        });
    }
    if n < 4 {
        return Err(MetricError::TooFewSamples {
            what: "nhsic",
            min: 4,
            got: n,
        });
    }
    let mut k = kernel.gram(za)?;
    let mut l = kernel.gram(zb)?;
    double_center(&mut k, n);
    double_center(&mut l, n);

    let mut cross = 0.0;
    let mut kk = 0.0;
    let mut ll = 0.0;
    for (a, b) in k.iter().zip(&l) {
        cross += a * b;
        kk += a * a;
        ll += b * b;
    }
    if kk <= 0.0 || ll <= 0.0 {
        return Err(MetricError::ZeroSelfHsic);
    }
    Ok((cross / (kk.sqrt() * ll.sqrt())).clamp(0.0, 1.0))
}

/// Unnormalized biased HSIC, trace(K H L H)/(N−1)².
pub fn hsic_biased(za: &Tensor, zb: &Tensor, kernel: &KernelSpec) -> Result<f64> {
    let n = za.rows();
    if n != zb.rows() {
        return Err(MetricError::RowMismatch {
            what: "hsic",
            a: n,
            b: zb.rows(),
        });
    }
    let mut k = kernel.gram(za)?;
    let mut l = kernel.gram(zb)?;
    double_center(&mut k, n);
    double_center(&mut l, n);
    let cross: f64 = k.iter().zip(&l).map(|(a, b)| a * b).sum();
    Ok(cross / ((n - 1) * (n - 1)) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn randn(rng: &mut ChaCha12Rng, n: usize, d: usize) -> Tensor {
        Tensor::from_vec(
            vec![n, d],
            (0..n * d)
                .map(|_| {
                    let u1: f64 = rng.random::<f64>().max(1e-12);
                    let u2: f64 = rng.random();
                    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
                })
                .collect(),
        )
    }

    #[test]
    fn self_dependence_is_exactly_one() {
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let z = randn(&mut rng, 64, 3);
        for kernel in [KernelSpec::Linear, KernelSpec::rbf_auto()] {
            let v = nhsic(&z, &z, &kernel).unwrap();
            assert!((v - 1.0).abs() < 1e-9, "{v}");
        }
    }

    #[test]
    fn constant_input_is_rejected() {
        let z = Tensor::from_vec(vec![8, 2], vec![1.0; 16]);
        let w = Tensor::from_vec(vec![8, 2], (0..16).map(|i| i as f64).collect());
        assert!(matches!(
            nhsic(&z, &w, &KernelSpec::Linear),
            Err(MetricError::ZeroSelfHsic)
        ));
    }

    #[test]
    fn independent_samples_fall_below_permutation_null() {
        // 95th percentile of a 100-permutation null as the independence bar.
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let n = 2000;
        let za = randn(&mut rng, n, 2);
        let zb = randn(&mut rng, n, 2);
        let kernel = KernelSpec::Linear;
        let observed = nhsic(&za, &zb, &kernel).unwrap();

        let mut null = Vec::with_capacity(100);
        let mut perm: Vec<usize> = (0..n).collect();
        for _ in 0..100 {
            // Fisher-Yates from the seeded rng.
            for i in (1..n).rev() {
                let j = rng.random_range(0..=i);
                perm.swap(i, j);
            }
            let shuffled = Tensor::from_vec(
                vec![n, 2],
                perm.iter().flat_map(|&i| zb.row(i).to_vec()).collect(),
            );
            null.push(nhsic(&za, &shuffled, &kernel).unwrap());
        }
        null.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let p95 = null[94];
        assert!(
            observed <= p95,
            "observed {observed} above 95th null percentile {p95}"
        );
    }

    #[test]
    fn invariant_to_joint_row_permutation() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let n = 128;
        let za = randn(&mut rng, n, 3);
        let zb = randn(&mut rng, n, 2);
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            perm.swap(i, j);
        }
        let permute = |t: &Tensor| {
            Tensor::from_vec(
                t.shape().to_vec(),
                perm.iter().flat_map(|&i| t.row(i).to_vec()).collect(),
            )
        };
        for kernel in [KernelSpec::Linear, KernelSpec::rbf_auto()] {
            let a = nhsic(&za, &zb, &kernel).unwrap();
            let b = nhsic(&permute(&za), &permute(&zb), &kernel).unwrap();
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn rbf_invariant_to_orthogonal_rotation() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let n = 128;
        let za = randn(&mut rng, n, 2);
        let zb = randn(&mut rng, n, 2);
        let theta = 0.83_f64;
        let rot = |t: &Tensor| {
            let data = (0..n)
                .flat_map(|i| {
                    let r = t.row(i);
                    vec![
                        r[0] * theta.cos() - r[1] * theta.sin(),
                        r[0] * theta.sin() + r[1] * theta.cos(),
                    ]
                })
                .collect();
            Tensor::from_vec(vec![n, 2], data)
        };
        let kernel = KernelSpec::Rbf {
            bandwidth: crate::kernels::Bandwidth::Fixed(1.3),
        };
        let a = nhsic(&za, &zb, &kernel).unwrap();
        let b = nhsic(&rot(&za), &zb, &kernel).unwrap();
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
}
