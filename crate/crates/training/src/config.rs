use ccalign_models::{GanKind, Likelihood};
use serde::{Deserialize, Serialize};

use crate::error::{Result, TrainError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Acca,
    AccaNocv,
    Bivcca,
    Mvae,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ModelKind::Acca => "acca",
            ModelKind::AccaNocv => "acca-nocv",
            ModelKind::Bivcca => "bivcca",
            ModelKind::Mvae => "mvae",
        };
        write!(f, "{s}")
    }
}

/// Run-level training parameters. Architecture widths live with the model
/// construction, not here.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub model: ModelKind,
    pub likelihood: Likelihood,
    pub gan: GanKind,
    /// Bi-VCCA trade-off between the two view branches.
    pub lambda: f64,
    /// Shared latent dimension.
    pub d: usize,
    /// Steps between diagnostic probes; 0 disables probing.
    pub probe_every: usize,
    /// Rows of the held-out probe batch.
    pub probe_size: usize,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(TrainError::InvalidConfig("epochs must be >= 1".into()));
        }
        if self.batch_size == 0 {
            return Err(TrainError::InvalidConfig("batch size must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(TrainError::InvalidConfig(format!(
                "lambda {} outside [0, 1]",
                self.lambda
            )));
        }
        if self.d == 0 {
            return Err(TrainError::InvalidConfig("d must be >= 1".into()));
        }
        Ok(())
    }
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 100,
            batch_size: 256,
            learning_rate: 0.001,
            seed: 0,
            model: ModelKind::Acca,
            likelihood: Likelihood::Gaussian,
            gan: GanKind::Standard,
            lambda: 0.5,
            d: 10,
            probe_every: 0,
            probe_size: 512,
        }
    }
}
