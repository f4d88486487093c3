//! Architecture manifests: enough structure to rebuild a model skeleton and
//! refill it from a parameter checkpoint. Serialized as JSON next to the
//! checkpoint files.

use serde::{Deserialize, Serialize};

use crate::acca::{AccaModel, GanKind};
use crate::bivcca::BivccaModel;
use crate::error::Result;
use crate::likelihood::Likelihood;
use crate::mlp::{GaussianEncoder, Mlp, MlpSpec};
use crate::mvae::MvaeModel;
use crate::prior::PriorSpec;

impl Mlp {
    /// Zero-initialized skeleton; parameters are expected to come from a
    /// checkpoint via `load_named`.
    pub fn skeleton(spec: MlpSpec) -> Result<Self> {
        struct ZeroRng;
        impl rand::RngCore for ZeroRng {
            fn next_u32(&mut self) -> u32 {
                0
            }
            fn next_u64(&mut self) -> u64 {
                0
            }
            fn fill_bytes(&mut self, dst: &mut [u8]) {
                dst.fill(0);
            }
        }
        Mlp::init(spec, &mut ZeroRng)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GaussianEncoderManifest {
    pub trunk: MlpSpec,
    pub mu: MlpSpec,
    pub logvar: MlpSpec,
}

impl GaussianEncoderManifest {
    fn of(enc: &GaussianEncoder) -> Self {
        Self {
            trunk: enc.trunk.spec.clone(),
            mu: enc.mu_head.spec.clone(),
            logvar: enc.logvar_head.spec.clone(),
        }
    }

    fn build(&self) -> Result<GaussianEncoder> {
        Ok(GaussianEncoder {
            trunk: Mlp::skeleton(self.trunk.clone())?,
            mu_head: Mlp::skeleton(self.mu.clone())?,
            logvar_head: Mlp::skeleton(self.logvar.clone())?,
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelManifest {
    Acca {
        enc_x: MlpSpec,
        enc_y: MlpSpec,
        enc_xy: Option<MlpSpec>,
        dec_x: MlpSpec,
        dec_y: MlpSpec,
        disc: MlpSpec,
        prior: PriorSpec,
        likelihood: Likelihood,
        gan: GanKind,
    },
    Bivcca {
        enc_x: GaussianEncoderManifest,
        enc_y: GaussianEncoderManifest,
        dec_x: MlpSpec,
        dec_y: MlpSpec,
        lambda: f64,
        l_samples: usize,
        likelihood: Likelihood,
    },
    Mvae {
        enc_x: MlpSpec,
        enc_y: MlpSpec,
        dec_x: MlpSpec,
        dec_y: MlpSpec,
    },
}

impl AccaModel {
    pub fn manifest(&self) -> ModelManifest {
        ModelManifest::Acca {
            enc_x: self.enc_x.spec.clone(),
            enc_y: self.enc_y.spec.clone(),
            enc_xy: self.enc_xy.as_ref().map(|e| e.spec.clone()),
            dec_x: self.dec_x.spec.clone(),
            dec_y: self.dec_y.spec.clone(),
            disc: self.disc.spec.clone(),
            prior: self.prior.clone(),
            likelihood: self.likelihood,
            gan: self.gan,
        }
    }
}

impl BivccaModel {
    pub fn manifest(&self) -> ModelManifest {
        ModelManifest::Bivcca {
            enc_x: GaussianEncoderManifest::of(&self.enc_x),
            enc_y: GaussianEncoderManifest::of(&self.enc_y),
            dec_x: self.dec_x.spec.clone(),
            dec_y: self.dec_y.spec.clone(),
            lambda: self.lambda,
            l_samples: self.l_samples,
            likelihood: self.likelihood,
        }
    }
}

impl MvaeModel {
    pub fn manifest(&self) -> ModelManifest {
        ModelManifest::Mvae {
            enc_x: self.enc_x.spec.clone(),
            enc_y: self.enc_y.spec.clone(),
            dec_x: self.dec_x.spec.clone(),
            dec_y: self.dec_y.spec.clone(),
        }
    }
}

impl ModelManifest {
    pub fn build_acca(&self) -> Result<AccaModel> {
        match self {
            ModelManifest::Acca {
                enc_x,
                enc_y,
                enc_xy,
                dec_x,
                dec_y,
                disc,
                prior,
                likelihood,
                gan,
            } => Ok(AccaModel {
                enc_x: Mlp::skeleton(enc_x.clone())?,
                enc_y: Mlp::skeleton(enc_y.clone())?,
                enc_xy: enc_xy.clone().map(Mlp::skeleton).transpose()?,
                dec_x: Mlp::skeleton(dec_x.clone())?,
                dec_y: Mlp::skeleton(dec_y.clone())?,
                disc: Mlp::skeleton(disc.clone())?,
                prior: prior.clone(),
                likelihood: *likelihood,
                gan: *gan,
            }),
            _ => Err(crate::error::ModelError::InvalidSpec(
                "manifest is not an adversarial model".into(),
            )),
        }
    }

    pub fn build_bivcca(&self) -> Result<BivccaModel> {
        match self {
            ModelManifest::Bivcca {
                enc_x,
                enc_y,
                dec_x,
                dec_y,
                lambda,
                l_samples,
                likelihood,
            } => Ok(BivccaModel {
                enc_x: enc_x.build()?,
                enc_y: enc_y.build()?,
                dec_x: Mlp::skeleton(dec_x.clone())?,
                dec_y: Mlp::skeleton(dec_y.clone())?,
                lambda: *lambda,
                l_samples: *l_samples,
                likelihood: *likelihood,
            }),
            _ => Err(crate::error::ModelError::InvalidSpec(
                "manifest is not a variational model".into(),
            )),
        }
    }

    pub fn build_mvae(&self) -> Result<MvaeModel> {
        match self {
            ModelManifest::Mvae {
                enc_x,
                enc_y,
                dec_x,
                dec_y,
            } => Ok(MvaeModel {
                enc_x: Mlp::skeleton(enc_x.clone())?,
                enc_y: Mlp::skeleton(enc_y.clone())?,
                dec_x: Mlp::skeleton(dec_x.clone())?,
                dec_y: Mlp::skeleton(dec_y.clone())?,
            }),
            _ => Err(crate::error::ModelError::InvalidSpec(
                "manifest is not an autoencoder model".into(),
            )),
        }
    }
}

