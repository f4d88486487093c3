use ccalign_tensor::Tensor;
use serde::{Deserialize, Serialize};

use crate::error::{MetricError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bandwidth {
    /// Median pairwise distance heuristic.
    Auto,
    Fixed(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum KernelSpec {
    Linear,
    Rbf { bandwidth: Bandwidth },
}

impl KernelSpec {
    pub fn rbf_auto() -> Self {
        KernelSpec::Rbf {
            bandwidth: Bandwidth::Auto,
        }
    }
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
}

/// Median of the nonzero pairwise Euclidean distances; 1.0 for degenerate
/// inputs where every distance vanishes.
pub fn median_heuristic(points: &Tensor) -> f64 {
    let n = points.rows();
    let mut d = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = sq_dist(points.row(i), points.row(j)).sqrt();
            if v > 0.0 {
                d.push(v);
            }
        }
    }
    if d.is_empty() {
        return 1.0;
    }
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    d[d.len() / 2]
}

impl KernelSpec {
    pub(crate) fn resolve_bandwidth(&self, points: &Tensor) -> Result<Option<f64>> {
        match self {
            KernelSpec::Linear => Ok(None),
            KernelSpec::Rbf { bandwidth } => {
                let sigma = match bandwidth {
                    Bandwidth::Auto => median_heuristic(points),
                    Bandwidth::Fixed(s) => *s,
                };
                if sigma <= 0.0 {
                    return Err(MetricError::BadBandwidth(sigma));
                }
                Ok(Some(sigma))
            }
        }
    }

    /// Full gram matrix (row-major n×n) for the given points.
    pub(crate) fn gram(&self, points: &Tensor) -> Result<Vec<f64>> {
        let n = points.rows();
        let sigma = self.resolve_bandwidth(points)?;
        let mut k = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = match sigma {
                    None => points
                        .row(i)
                        .iter()
                        .zip(points.row(j))
                        .map(|(a, b)| a * b)
                        .sum::<f64>(),
                    Some(s) => (-sq_dist(points.row(i), points.row(j)) / (2.0 * s * s)).exp(),
                };
                k[i * n + j] = v;
                k[j * n + i] = v;
            }
        }
        Ok(k)
    }
}
