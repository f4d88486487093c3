use ccalign_tensor::Tensor;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::{DataError, Result};

/// One-dimensional Gaussian mixture: weighted components (weight, mean,
/// stddev). Weights must be nonnegative and sum to 1 within 1e-9.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GmmSpec {
    pub components: Vec<GmmComponent>,
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GmmComponent {
    pub weight: f64,
    pub mean: f64,
    pub stddev: f64,
}

impl GmmSpec {
    pub fn new(components: Vec<(f64, f64, f64)>) -> Result<Self> {
        let spec = Self {
            components: components
                .into_iter()
                .map(|(weight, mean, stddev)| GmmComponent {
                    weight,
                    mean,
                    stddev,
                })
                .collect(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// The mixture used throughout the toy experiments:
    /// 0.2·N(0,1) + 0.5·N(8,2) + 0.3·N(3,1.5).
    pub fn toy_prior() -> Self {
        Self::new(vec![(0.2, 0.0, 1.0), (0.5, 8.0, 2.0), (0.3, 3.0, 1.5)])
            .expect("literal spec is valid")
    }

    pub fn validate(&self) -> Result<()> {
        if self.components.is_empty() {
            return Err(DataError::InvalidSpec("no components".into()));
        }
        let mut total = 0.0;
        for c in &self.components {
            if c.weight < 0.0 {
                return Err(DataError::InvalidSpec(format!(
                    "negative weight {}",
                    c.weight
                )));
            }
            if c.stddev <= 0.0 {
                return Err(DataError::InvalidSpec(format!(
                    "non-positive stddev {}",
                    c.stddev
                )));
            }
            total += c.weight;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(DataError::InvalidSpec(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(())
    }

    /// Analytic mean of the scalar mixture.
    pub fn mean(&self) -> f64 {
        self.components.iter().map(|c| c.weight * c.mean).sum()
    }

    /// Analytic variance: Σ wᵢ(σᵢ² + μᵢ²) − μ².
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.components
            .iter()
            .map(|c| c.weight * (c.stddev * c.stddev + c.mean * c.mean))
            .sum::<f64>()
            - m * m
    }

    /// Draw one scalar from the mixture.
    pub fn sample_scalar<R: Rng>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut chosen = &self.components[self.components.len() - 1];
        for c in &self.components {
            acc += c.weight;
            if u < acc {
                chosen = c;
                break;
            }
        }
        let z: f64 = rng.sample(StandardNormal);
        chosen.mean + chosen.stddev * z
    }
}

/// `n × dim` matrix with every entry drawn i.i.d. from the scalar mixture.
/// Deterministic under `seed`.
pub fn sample_gmm(spec: &GmmSpec, n: usize, dim: usize, seed: u64) -> Result<Tensor> {
    spec.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let data: Vec<f64> = (0..n * dim).map(|_| spec.sample_scalar(&mut rng)).collect();
    Ok(Tensor::from_vec(vec![n, dim], data))
}
