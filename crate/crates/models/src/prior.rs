use ccalign_datasets::GmmSpec;
use ccalign_tensor::Tensor;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

/// Sampleable prior p₀(z): isotropic Gaussian or a per-dimension scalar
/// Gaussian mixture.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PriorSpec {
    IsotropicGaussian { dim: usize },
    Gmm { spec: GmmSpec, dim: usize },
}

impl PriorSpec {
    pub fn dim(&self) -> usize {
        match self {
            PriorSpec::IsotropicGaussian { dim } | PriorSpec::Gmm { dim, .. } => *dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim() == 0 {
            return Err(ModelError::InvalidSpec("prior dim must be >= 1".into()));
        }
        if let PriorSpec::Gmm { spec, .. } = self {
            spec.validate()?;
        }
        Ok(())
    }

    /// Draw `n` samples as an `n × dim` matrix.
    pub fn sample<R: Rng>(&self, n: usize, rng: &mut R) -> Tensor {
        let dim = self.dim();
        let data: Vec<f64> = match self {
            PriorSpec::IsotropicGaussian { .. } => (0..n * dim)
                .map(|_| StandardNormal.sample(rng))
                .collect(),
            PriorSpec::Gmm { spec, .. } => {
                (0..n * dim).map(|_| spec.sample_scalar(rng)).collect()
            }
        };
        Tensor::from_vec(vec![n, dim], data)
    }
}
