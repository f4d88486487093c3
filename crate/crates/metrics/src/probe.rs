//! Linear probing of embeddings: one-vs-rest linear classifiers trained with
//! hinge-loss SGD on a train split, scored on a test split.

use ccalign_tensor::Tensor;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{MetricError, Result};

#[derive(Clone, Debug)]
pub struct ProbeSplits {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

impl ProbeSplits {
    /// Deterministic shuffled split with the given train fraction.
    pub fn fraction(n: usize, train_fraction: f64, seed: u64) -> Self {
        let mut idx: Vec<usize> = (0..n).collect();
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            idx.swap(i, j);
        }
        let cut = ((n as f64) * train_fraction).round() as usize;
        Self {
            train: idx[..cut].to_vec(),
            test: idx[cut..].to_vec(),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ProbeResult {
    pub train_accuracy: f64,
    pub test_accuracy: f64,
}

const LR: f64 = 0.05;
const L2: f64 = 1e-4;

/// Train one-vs-rest hinge classifiers for `epochs` passes over the train
/// split (shuffled per epoch from `seed`) and report accuracies.
pub fn linear_probe(
    z: &Tensor,
    labels: &[i64],
    splits: &ProbeSplits,
    epochs: usize,
    seed: u64,
) -> Result<ProbeResult> {
    assert_eq!(z.rows(), labels.len(), "one label per row");
    let d = z.cols();
    let mut classes: Vec<i64> = splits.train.iter().map(|&i| labels[i]).collect();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(MetricError::SingleClassTrain);
    }

    // w has an extra bias slot per class.
    let mut w = vec![vec![0.0; d + 1]; classes.len()];
    let mut order = splits.train.clone();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    for _ in 0..epochs.max(1) {
        for i in (1..order.len()).rev() {
            let j = rng.random_range(0..=i);
            order.swap(i, j);
        }
        for &i in &order {
            let row = z.row(i);
            for (c, class) in classes.iter().enumerate() {
                let target = if labels[i] == *class { 1.0 } else { -1.0 };
                let score = w[c][d]
                    + row
                        .iter()
                        .zip(&w[c][..d])
                        .map(|(x, wi)| x * wi)
                        .sum::<f64>();
                for wi in w[c].iter_mut() {
                    *wi *= 1.0 - LR * L2;
                }
                if target * score < 1.0 {
                    for (j, x) in row.iter().enumerate() {
                        w[c][j] += LR * target * x;
                    }
                    w[c][d] += LR * target;
                }
            }
        }
    }

    let accuracy = |rows: &[usize]| -> f64 {
        if rows.is_empty() {
            return 0.0;
        }
        let mut correct = 0usize;
        for &i in rows {
            let row = z.row(i);
            let mut best = (0usize, f64::NEG_INFINITY);
            for (c, wc) in w.iter().enumerate() {
                let score = wc[d]
                    + row
                        .iter()
                        .zip(&wc[..d])
                        .map(|(x, wi)| x * wi)
                        .sum::<f64>();
                if score > best.1 {
                    best = (c, score);
                }
            }
            if classes[best.0] == labels[i] {
                correct += 1;
            }
        }
        correct as f64 / rows.len() as f64
    };

    Ok(ProbeResult {
        train_accuracy: accuracy(&splits.train),
        test_accuracy: accuracy(&splits.test),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_blobs_reach_full_train_accuracy() {
        let n = 60;
        let mut data = Vec::with_capacity(n * 2);
        let mut labels = Vec::with_capacity(n);
        for i in 0..n {
            let wiggle = (i % 5) as f64 * 0.02;
            if i % 2 == 0 {
                data.extend_from_slice(&[1.0 + wiggle, 1.0]);
                labels.push(0);
            } else {
                data.extend_from_slice(&[-1.0 - wiggle, -1.0]);
                labels.push(1);
            }
        }
        let z = Tensor::from_vec(vec![n, 2], data);
        let splits = ProbeSplits::fraction(n, 0.8, 1);
        let res = linear_probe(&z, &labels, &splits, 30, 2).unwrap();
        assert_eq!(res.train_accuracy, 1.0);
        assert_eq!(res.test_accuracy, 1.0);
    }

    #[test]
    fn random_labels_score_near_chance() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let n = 5000;
        let c = 4;
        let z = Tensor::from_vec(
            vec![n, 3],
            (0..n * 3).map(|_| rng.random_range(-1.0..1.0)).collect(),
        );
        let labels: Vec<i64> = (0..n).map(|_| rng.random_range(0..c) as i64).collect();
        let splits = ProbeSplits::fraction(n, 0.7, 6);
        let res = linear_probe(&z, &labels, &splits, 5, 7).unwrap();
        let chance = 1.0 / c as f64;
        assert!(
            (res.test_accuracy - chance).abs() < 0.05,
            "test accuracy {} vs chance {}",
            res.test_accuracy,
            chance
        );
    }

    #[test]
    fn single_class_train_split_is_rejected() {
        let z = Tensor::from_vec(vec![4, 1], vec![0.0, 1.0, 2.0, 3.0]);
        let labels = vec![1, 1, 1, 2];
        let splits = ProbeSplits {
            train: vec![0, 1, 2],
            test: vec![3],
        };
        assert!(matches!(
            linear_probe(&z, &labels, &splits, 3, 0),
            Err(MetricError::SingleClassTrain)
        ));
    }
}
