use ccalign_tensor::Var;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::mlp::Activation;

/// Observation model for reconstruction terms. Gaussian gives a squared-error
/// negative log-likelihood with an identity decoder output; Bernoulli gives
/// pixelwise cross-entropy with a sigmoid decoder output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Likelihood {
    Gaussian,
    Bernoulli,
}

/// Keeps log() away from exact zeros of a sigmoid output.
const LOG_EPS: f64 = 1e-12;

impl Likelihood {
    pub fn decoder_activation(&self) -> Activation {
        match self {
            Likelihood::Gaussian => Activation::Identity,
            Likelihood::Bernoulli => Activation::Sigmoid,
        }
    }

    /// Negative log-likelihood of `target` under the decoded `pred`, summed
    /// over dimensions and averaged over the batch (constants dropped).
    pub fn recon_nll<'t>(&self, pred: Var<'t>, target: Var<'t>) -> Result<Var<'t>> {
        let n = pred.shape()[0] as f64;
        let nll = match self {
            Likelihood::Gaussian => pred.sub(target)?.square()?.sum()?.scale(0.5 / n)?,
            Likelihood::Bernoulli => {
                let log_p = pred.add_scalar(LOG_EPS)?.log()?;
                let log_1p = pred.neg()?.add_scalar(1.0 + LOG_EPS)?.log()?;
                let one_minus_t = target.neg()?.add_scalar(1.0)?;
                target
                    .mul(log_p)?
                    .add(one_minus_t.mul(log_1p)?)?
                    .sum()?
                    .scale(-1.0 / n)?
            }
        };
        Ok(nll)
    }
}
