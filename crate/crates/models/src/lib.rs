//! CCA-family models for two-view alignment: classic linear CCA, its
//! probabilistic variant fitted by EM, the multi-view autoencoder, Bi-VCCA,
//! and adversarial CCA with a shared discriminator over the marginalized
//! encodings.

mod acca;
mod bivcca;
mod error;
mod likelihood;
mod linear_cca;
mod manifest;
mod mlp;
mod mvae;
mod pcca;
mod prior;

pub use acca::{
    acca_discriminator_loss, acca_discriminator_loss_graph, acca_encoder_adversarial_loss,
    acca_encoder_adversarial_loss_graph, acca_r_gan, acca_reconstruction_loss,
    acca_reconstruction_loss_graph, acca_reconstruction_terms, AccaArch, AccaModel, AccaPhase,
    AccaVars, GanKind,
};
pub use bivcca::{
    bivcca_loss, bivcca_loss_graph, kl_diag_gaussian, kl_diag_gaussian_graph, BivccaArch,
    BivccaModel, BivccaVars,
};
pub use error::{ModelError, Result};
pub use likelihood::Likelihood;
pub use linear_cca::{linear_cca_fit, LinearCcaResult};
pub use manifest::{GaussianEncoderManifest, ModelManifest};
pub use mlp::{
    Activation, GaussianEncoder, GaussianEncoderVars, Mlp, MlpSpec, MlpVars, Trainable,
};
pub use mvae::{mvae_loss, mvae_loss_graph, MvaeArch, MvaeModel, MvaeVars};
pub use pcca::{pcca_fit_em, principal_angles_deg, PccaFit, PccaParams};
pub use prior::PriorSpec;
