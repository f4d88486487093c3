//! Lloyd's k-means with k-means++ seeding. Empty clusters are re-seeded at
//! the point farthest from its assigned centroid; the within-cluster sum of
//! squares never increases across iterations.

use ccalign_tensor::Tensor;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{MetricError, Result};
use crate::kernels::sq_dist;

#[derive(Clone, Debug)]
pub struct KmeansResult {
    pub assignments: Vec<usize>,
    /// `k × d` centroid matrix.
    pub centroids: Tensor,
    /// WCSS after each Lloyd iteration.
    pub wcss_trace: Vec<f64>,
}

pub fn kmeans(z: &Tensor, k: usize, seed: u64, iters: usize) -> Result<KmeansResult> {
    let (n, d) = (z.rows(), z.cols());
    if k == 0 || k > n {
        return Err(MetricError::BadClusterCount { k, n });
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);

    // k-means++ seeding.
    let mut centroids: Vec<Vec<f64>> = Vec::with_capacity(k);
    centroids.push(z.row(rng.random_range(0..n)).to_vec());
    let mut best_d2: Vec<f64> = (0..n).map(|i| sq_dist(z.row(i), &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = best_d2.iter().sum();
        let next = if total <= 0.0 {
            rng.random_range(0..n)
        } else {
            let mut u = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, d2) in best_d2.iter().enumerate() {
                u -= d2;
                if u <= 0.0 {
                    pick = i;
                    break;
                }
            }
            pick
        };
        centroids.push(z.row(next).to_vec());
        for i in 0..n {
            let d2 = sq_dist(z.row(i), centroids.last().unwrap());
            if d2 < best_d2[i] {
                best_d2[i] = d2;
            }
        }
    }

    let mut assignments = vec![0usize; n];
    let mut wcss_trace = Vec::new();
    for _ in 0..iters.max(1) {
        // Assignment step.
        let mut wcss = 0.0;
        for i in 0..n {
            let mut best = (0usize, f64::INFINITY);
            for (c, centroid) in centroids.iter().enumerate() {
                let d2 = sq_dist(z.row(i), centroid);
                if d2 < best.1 {
                    best = (c, d2);
                }
            }
            assignments[i] = best.0;
            wcss += best.1;
        }
        if let Some(prev) = wcss_trace.last() {
            if wcss >= *prev - 1e-12 {
                wcss_trace.push(wcss);
                break;
            }
        }
        wcss_trace.push(wcss);

        // Update step.
        let mut sums = vec![vec![0.0; d]; k];
        let mut counts = vec![0usize; k];
        for i in 0..n {
            counts[assignments[i]] += 1;
            for (j, v) in z.row(i).iter().enumerate() {
                sums[assignments[i]][j] += v;
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                // Re-seed at the point farthest from its assigned centroid.
                let far = (0..n)
                    .max_by(|&a, &b| {
                        sq_dist(z.row(a), &centroids[assignments[a]])
                            .partial_cmp(&sq_dist(z.row(b), &centroids[assignments[b]]))
                            .unwrap()
                    })
                    .unwrap();
                centroids[c] = z.row(far).to_vec();
            } else {
                for j in 0..d {
                    centroids[c][j] = sums[c][j] / counts[c] as f64;
                }
            }
        }
    }

    let centroid_tensor = Tensor::from_vec(vec![k, d], centroids.concat());
    Ok(KmeansResult {
        assignments,
        centroids: centroid_tensor,
        wcss_trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_equal_one_gives_the_mean() {
        let z = Tensor::from_vec(vec![4, 2], vec![0.0, 0.0, 2.0, 0.0, 0.0, 2.0, 2.0, 2.0]);
        let res = kmeans(&z, 1, 7, 20).unwrap();
        assert_eq!(res.centroids.row(0), &[1.0, 1.0]);
    }

    #[test]
    fn well_separated_blobs_are_perfectly_recovered() {
        // Two blobs 20σ apart (σ = 0.05 spread around ±0.5 in x).
        let mut data = Vec::new();
        for i in 0..40 {
            let jitter = (i % 7) as f64 * 0.01;
            if i < 20 {
                data.extend_from_slice(&[0.0 + jitter, 0.0]);
            } else {
                data.extend_from_slice(&[20.0 + jitter, 0.0]);
            }
        }
        let z = Tensor::from_vec(vec![40, 2], data);
        let res = kmeans(&z, 2, 3, 50).unwrap();
        let first = res.assignments[0];
        assert!(res.assignments[..20].iter().all(|a| *a == first));
        assert!(res.assignments[20..].iter().all(|a| *a != first));
    }

    #[test]
    fn wcss_trace_never_increases() {
        let z = Tensor::from_vec(
            vec![50, 2],
            (0..100).map(|i| ((i * 37) % 23) as f64 * 0.3).collect(),
        );
        let res = kmeans(&z, 4, 11, 40).unwrap();
        for pair in res.wcss_trace.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-12, "{} -> {}", pair[0], pair[1]);
        }
    }

    #[test]
    fn k_larger_than_n_is_rejected() {
        let z = Tensor::from_vec(vec![2, 1], vec![0.0, 1.0]);
        assert!(matches!(
            kmeans(&z, 3, 0, 5),
            Err(MetricError::BadClusterCount { .. })
        ));
    }
}
