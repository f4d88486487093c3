//! Conditional mutual information I(X;Y|Z) by the k-nearest-neighbor
//! estimator of Frenzel and Pompe: ψ(k) − ⟨ψ(n_xz+1) + ψ(n_yz+1) − ψ(n_z+1)⟩
//! with Chebyshev-metric neighbor counts inside the radius of the k-th joint
//! neighbor. Ties from duplicate points are broken with seeded jitter at
//! 1e-10 scale; the estimate is deterministic for fixed inputs.

use ccalign_tensor::Tensor;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{MetricError, Result};

const JITTER_SCALE: f64 = 1e-10;
const JITTER_SEED: u64 = 0x5eed_cafe;

/// Digamma at positive integers: ψ(n) = −γ + Σ_{m<n} 1/m.
fn digamma_table(max_n: usize) -> Vec<f64> {
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    let mut t = vec![0.0; max_n + 1];
    if max_n >= 1 {
        t[1] = -EULER_GAMMA;
    }
    for n in 2..=max_n {
        t[n] = t[n - 1] + 1.0 / (n as f64 - 1.0);
    }
    t
}

fn jittered(t: &Tensor, rng: &mut ChaCha12Rng) -> Vec<f64> {
    t.data()
        .iter()
        .map(|v| v + rng.random_range(-JITTER_SCALE..JITTER_SCALE))
        .collect()
}

/// Chebyshev distance between rows `i` and `j` of a flattened matrix.
fn cheb(data: &[f64], d: usize, i: usize, j: usize) -> f64 {
    let (a, b) = (&data[i * d..(i + 1) * d], &data[j * d..(j + 1) * d]);
    let mut m = 0.0_f64;
    for (x, y) in a.iter().zip(b) {
        m = m.max((x - y).abs());
    }
    m
}

pub fn cmi_ksg(x: &Tensor, y: &Tensor, z: &Tensor, k: usize) -> Result<f64> {
    let n = x.rows();
    if y.rows() != n || z.rows() != n {
        return Err(MetricError::RowMismatch {
            what: "cmi_ksg",
            a: n,
            b: y.rows().min(z.rows()),
        });
    }
    if k == 0 || k >= n {
        return Err(MetricError::BadNeighborCount { k, n });
    }
    let (dx, dy, dz) = (x.cols(), y.cols(), z.cols());
    let mut rng = ChaCha12Rng::seed_from_u64(JITTER_SEED);
    let xj = jittered(x, &mut rng);
    let yj = jittered(y, &mut rng);
    let zj = jittered(z, &mut rng);

    let psi = digamma_table(n + 1);
    let mut acc = 0.0;
    let mut dist_joint = vec![0.0; n];
    for i in 0..n {
        // Joint-space Chebyshev distances from i.
        for j in 0..n {
            let dxz = cheb(&zj, dz, i, j);
            let dxy = cheb(&xj, dx, i, j).max(cheb(&yj, dy, i, j));
            dist_joint[j] = dxz.max(dxy);
        }
        dist_joint[i] = f64::INFINITY;
        // Radius of the k-th nearest joint neighbor.
        let mut kth = f64::INFINITY;
        {
            let mut top: Vec<f64> = Vec::with_capacity(k + 1);
            for &dv in dist_joint.iter() {
                if top.len() < k {
                    top.push(dv);
                    top.sort_by(|a, b| a.partial_cmp(b).unwrap());
                } else if dv < top[k - 1] {
                    top[k - 1] = dv;
                    top.sort_by(|a, b| a.partial_cmp(b).unwrap());
                }
            }
            if let Some(last) = top.last() {
                kth = *last;
            }
        }
        let eps = kth;

        // Marginal counts strictly inside the radius.
        let mut n_xz = 0usize;
        let mut n_yz = 0usize;
        let mut n_z = 0usize;
        for j in 0..n {
            if j == i {
                continue;
            }
            let dz_ij = cheb(&zj, dz, i, j);
            if dz_ij < eps {
                n_z += 1;
                if dz_ij.max(cheb(&xj, dx, i, j)) < eps {
                    n_xz += 1;
                }
                if dz_ij.max(cheb(&yj, dy, i, j)) < eps {
                    n_yz += 1;
                }
            }
        }
        acc += psi[n_xz + 1] + psi[n_yz + 1] - psi[n_z + 1];
    }
    Ok(psi[k] - acc / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, StandardNormal};

    fn col(rng: &mut ChaCha12Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| StandardNormal.sample(rng)).collect()
    }

    fn t(v: Vec<f64>) -> Tensor {
        let n = v.len();
        Tensor::from_vec(vec![n, 1], v)
    }

    #[test]
    fn independent_gaussians_have_near_zero_cmi() {
        let mut rng = ChaCha12Rng::seed_from_u64(10);
        let n = 5000;
        let x = t(col(&mut rng, n));
        let y = t(col(&mut rng, n));
        let z = t(col(&mut rng, n));
        let v = cmi_ksg(&x, &y, &z, 3).unwrap();
        assert!(v.abs() < 0.05, "{v}");
    }

    #[test]
    fn conditionally_independent_chain_has_near_zero_cmi() {
        // X = Z + ε₁, Y = Z + ε₂ with independent noises: I(X;Y|Z) = 0.
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let n = 5000;
        let zc = col(&mut rng, n);
        let x: Vec<f64> = zc
            .iter()
            .map(|z| {
                let e: f64 = StandardNormal.sample(&mut rng);
                z + e
            })
            .collect();
        let y: Vec<f64> = zc
            .iter()
            .map(|z| {
                let e: f64 = StandardNormal.sample(&mut rng);
                z + e
            })
            .collect();
        let v = cmi_ksg(&t(x), &t(y), &t(zc), 3).unwrap();
        assert!(v.abs() < 0.05, "{v}");
    }

    #[test]
    fn strongly_dependent_pair_matches_gaussian_closed_form() {
        // Y = X + N(0, 0.01) with Z independent noise:
        // I(X;Y|Z) = I(X;Y) = ½·ln(1/(1−ρ²)) = ½·ln(101) ≈ 2.31 nats.
        let mut rng = ChaCha12Rng::seed_from_u64(12);
        let n = 5000;
        let x = col(&mut rng, n);
        let y: Vec<f64> = x
            .iter()
            .map(|v| {
                let e: f64 = StandardNormal.sample(&mut rng);
                v + 0.1 * e
            })
            .collect();
        let z = col(&mut rng, n);
        let v = cmi_ksg(&t(x), &t(y), &t(z), 3).unwrap();
        let expected = 0.5 * 101.0_f64.ln();
        assert!((v - expected).abs() < 0.3, "{v} vs {expected}");
    }

    #[test]
    fn invariant_to_monotone_transform_of_x() {
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        let n = 2000;
        let x = col(&mut rng, n);
        let y = col(&mut rng, n);
        let z = col(&mut rng, n);
        let base = cmi_ksg(&t(x.clone()), &t(y.clone()), &t(z.clone()), 3).unwrap();
        let warped: Vec<f64> = x.iter().map(|v| v.powi(3) + 2.0 * v).collect();
        let after = cmi_ksg(&t(warped), &t(y), &t(z), 3).unwrap();
        assert!((base - after).abs() < 0.1, "{base} vs {after}");
    }

    #[test]
    fn duplicate_points_do_not_produce_nan() {
        let x = t(vec![1.0; 64]);
        let y = t(vec![2.0; 64]);
        let z = t(vec![3.0; 64]);
        let v = cmi_ksg(&x, &y, &z, 3).unwrap();
        assert!(v.is_finite());
    }

    #[test]
    fn bad_k_is_rejected() {
        let x = t(vec![0.0, 1.0, 2.0]);
        assert!(matches!(
            cmi_ksg(&x, &x, &x, 3),
            Err(MetricError::BadNeighborCount { .. })
        ));
        assert!(matches!(
            cmi_ksg(&x, &x, &x, 0),
            Err(MetricError::BadNeighborCount { .. })
        ));
    }
}
