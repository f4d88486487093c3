//! Adversarial CCA: three deterministic encoders (the two principal views
//! plus their concatenation), two decoders, and one discriminator shared by
//! all three encodings. The reconstruction objective decodes both views from
//! each encoding; the adversarial regularizer matches the three marginalized
//! encodings to a common prior by treating each encoder as a generator
//! against the shared discriminator. Dropping the joint encoder gives the
//! no-complementary-view variant.

use ccalign_tensor::{Tape, Tensor, Var};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::likelihood::Likelihood;
use crate::mlp::{Activation, Mlp, MlpSpec, MlpVars, Trainable};
use crate::prior::PriorSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GanKind {
    /// Cross-entropy discriminator, non-saturating generator loss.
    Standard,
    /// Least-squares targets 1 (prior) / 0 (encodings).
    LsGan,
}

/// Keeps log() finite when the discriminator saturates.
const LOG_EPS: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct AccaModel {
    pub enc_x: Mlp,
    pub enc_y: Mlp,
    /// Encoder of the concatenated auxiliary view; `None` for the
    /// no-complementary-view variant.
    pub enc_xy: Option<Mlp>,
    pub dec_x: Mlp,
    pub dec_y: Mlp,
    pub disc: Mlp,
    pub prior: PriorSpec,
    pub likelihood: Likelihood,
    pub gan: GanKind,
}

#[derive(Clone, Debug)]
pub struct AccaArch {
    pub d_x: usize,
    pub d_y: usize,
    pub d: usize,
    pub enc_hidden: Vec<usize>,
    pub dec_hidden: Vec<usize>,
    pub disc_hidden: Vec<usize>,
    pub activation: Activation,
    pub likelihood: Likelihood,
    pub gan: GanKind,
    pub prior: PriorSpec,
    /// When false, the auxiliary-view encoder is omitted.
    pub complementary_view: bool,
}

impl AccaArch {
    pub fn build<R: Rng>(&self, rng: &mut R) -> Result<AccaModel> {
        self.prior.validate()?;
        if self.prior.dim() != self.d {
            return Err(ModelError::DimMismatch {
                what: "prior dim",
                expected: self.d,
                got: self.prior.dim(),
            });
        }
        let enc = |input: usize, rng: &mut R| {
            Mlp::init(
                MlpSpec::chain(
                    input,
                    &self.enc_hidden,
                    self.d,
                    self.activation,
                    Activation::Identity,
                ),
                rng,
            )
        };
        let dec = |output: usize, rng: &mut R| {
            Mlp::init(
                MlpSpec::chain(
                    self.d,
                    &self.dec_hidden,
                    output,
                    self.activation,
                    self.likelihood.decoder_activation(),
                ),
                rng,
            )
        };
        Ok(AccaModel {
            enc_x: enc(self.d_x, rng)?,
            enc_y: enc(self.d_y, rng)?,
            enc_xy: if self.complementary_view {
                Some(enc(self.d_x + self.d_y, rng)?)
            } else {
                None
            },
            dec_x: dec(self.d_x, rng)?,
            dec_y: dec(self.d_y, rng)?,
            disc: Mlp::init(
                MlpSpec::chain(self.d, &self.disc_hidden, 1, self.activation, Activation::Sigmoid),
                rng,
            )?,
        prior: self.prior.clone(),
            likelihood: self.likelihood,
            gan: self.gan,
        })
    }
}

impl AccaModel {
    pub fn latent_dim(&self) -> usize {
        self.enc_x.spec.output_dim()
    }

    pub fn reconstruction_params_mut(&mut self) -> Vec<&mut Tensor> {
        let mut p = self.enc_x.params_mut();
        p.extend(self.enc_y.params_mut());
        if let Some(e) = self.enc_xy.as_mut() {
            p.extend(e.params_mut());
        }
        p.extend(self.dec_x.params_mut());
        p.extend(self.dec_y.params_mut());
        p
    }

    pub fn encoder_params_mut(&mut self) -> Vec<&mut Tensor> {
        let mut p = self.enc_x.params_mut();
        p.extend(self.enc_y.params_mut());
        if let Some(e) = self.enc_xy.as_mut() {
            p.extend(e.params_mut());
        }
        p
    }

    pub fn discriminator_params_mut(&mut self) -> Vec<&mut Tensor> {
        self.disc.params_mut()
    }

    pub fn named_params(&self) -> Vec<(String, &Tensor)> {
        let mut out = self.enc_x.named_params("enc_x");
        out.extend(self.enc_y.named_params("enc_y"));
        if let Some(e) = &self.enc_xy {
            out.extend(e.named_params("enc_xy"));
        }
        out.extend(self.dec_x.named_params("dec_x"));
        out.extend(self.dec_y.named_params("dec_y"));
        out.extend(self.disc.named_params("disc"));
        out
    }

    pub fn load_named(&mut self, entries: &[(String, Tensor)]) -> Result<()> {
        self.enc_x.load_named("enc_x", entries)?;
        self.enc_y.load_named("enc_y", entries)?;
        if let Some(e) = self.enc_xy.as_mut() {
            e.load_named("enc_xy", entries)?;
        }
        self.dec_x.load_named("dec_x", entries)?;
        self.dec_y.load_named("dec_y", entries)?;
        self.disc.load_named("disc", entries)
    }
}

/// Which parameter groups record gradients for the current phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AccaPhase {
    /// Encoders and decoders trainable (reconstruction phase).
    Reconstruction,
    /// Discriminator trainable, encoders frozen.
    Discriminator,
    /// Encoders trainable, discriminator frozen (adversarial phase).
    EncoderAdversarial,
    /// Everything frozen (evaluation).
    Frozen,
}

pub struct AccaVars<'t> {
    pub enc_x: MlpVars<'t>,
    pub enc_y: MlpVars<'t>,
    pub enc_xy: Option<MlpVars<'t>>,
    pub dec_x: MlpVars<'t>,
    pub dec_y: MlpVars<'t>,
    pub disc: MlpVars<'t>,
}

impl AccaModel {
    pub fn mount<'t>(&self, tape: &'t Tape, phase: AccaPhase) -> AccaVars<'t> {
        use AccaPhase::*;
        let enc = match phase {
            Reconstruction | EncoderAdversarial => Trainable::Yes,
            Discriminator | Frozen => Trainable::No,
        };
        let dec = match phase {
            Reconstruction => Trainable::Yes,
            _ => Trainable::No,
        };
        let disc = match phase {
            Discriminator => Trainable::Yes,
            _ => Trainable::No,
        };
        AccaVars {
            enc_x: self.enc_x.mount(tape, enc),
            enc_y: self.enc_y.mount(tape, enc),
            enc_xy: self.enc_xy.as_ref().map(|e| e.mount(tape, enc)),
            dec_x: self.dec_x.mount(tape, dec),
            dec_y: self.dec_y.mount(tape, dec),
            disc: self.disc.mount(tape, disc),
        }
    }
}

impl<'t> AccaVars<'t> {
    /// Encodings in fixed order: joint view first when present, then X, Y.
    pub fn encodings(&self, x: Var<'t>, y: Var<'t>) -> Result<Vec<Var<'t>>> {
        let mut zs = Vec::with_capacity(3);
        if let Some(exy) = &self.enc_xy {
            zs.push(exy.forward(x.concat(y, 1)?)?);
        }
        zs.push(self.enc_x.forward(x)?);
        zs.push(self.enc_y.forward(y)?);
        Ok(zs)
    }

    /// Matches [`AccaModel::encoder_params_mut`] ordering.
    pub fn encoder_vars(&self) -> Vec<Var<'t>> {
        let mut v = self.enc_x.all_vars();
        v.extend(self.enc_y.all_vars());
        if let Some(e) = &self.enc_xy {
            v.extend(e.all_vars());
        }
        v
    }

    /// Matches [`AccaModel::reconstruction_params_mut`] ordering.
    pub fn reconstruction_vars(&self) -> Vec<Var<'t>> {
        let mut v = self.encoder_vars();
        v.extend(self.dec_x.all_vars());
        v.extend(self.dec_y.all_vars());
        v
    }

    /// Matches [`AccaModel::discriminator_params_mut`] ordering.
    pub fn discriminator_vars(&self) -> Vec<Var<'t>> {
        self.disc.all_vars()
    }
}

/// Per-encoding reconstruction terms: for each encoding z, the negative
/// log-likelihood of decoding both views from z. Order matches
/// [`AccaVars::encodings`].
pub fn acca_reconstruction_terms<'t>(
    vars: &AccaVars<'t>,
    likelihood: Likelihood,
    x: Var<'t>,
    y: Var<'t>,
) -> Result<Vec<Var<'t>>> {
    let mut terms = Vec::with_capacity(3);
    for z in vars.encodings(x, y)? {
        let t = likelihood
            .recon_nll(vars.dec_x.forward(z)?, x)?
            .add(likelihood.recon_nll(vars.dec_y.forward(z)?, y)?)?;
        terms.push(t);
    }
    Ok(terms)
}

/// Sum of the per-encoding reconstruction terms (the reconstruction part of
/// the training objective).
pub fn acca_reconstruction_loss_graph<'t>(
    vars: &AccaVars<'t>,
    likelihood: Likelihood,
    x: Var<'t>,
    y: Var<'t>,
) -> Result<Var<'t>> {
    let terms = acca_reconstruction_terms(vars, likelihood, x, y)?;
    let mut total = terms[0];
    for t in &terms[1..] {
        total = total.add(*t)?;
    }
    Ok(total)
}

/// Reconstruction loss value on a batch.
pub fn acca_reconstruction_loss(model: &AccaModel, x: &Tensor, y: &Tensor) -> Result<f64> {
    let tape = Tape::new();
    let xv = tape.constant(x.clone());
    let yv = tape.constant(y.clone());
    let vars = model.mount(&tape, AccaPhase::Frozen);
    Ok(acca_reconstruction_loss_graph(&vars, model.likelihood, xv, yv)?.item())
}

fn log_clamped<'t>(v: Var<'t>) -> Result<Var<'t>> {
    Ok(v.add_scalar(LOG_EPS)?.log()?)
}

fn log_one_minus<'t>(v: Var<'t>) -> Result<Var<'t>> {
    Ok(v.neg()?.add_scalar(1.0 + LOG_EPS)?.log()?)
}

/// Discriminator objective over one prior batch and the encodings of the
/// data batch (minimized over the discriminator):
///
/// standard: −[E log D̂(z_prior) + Σ_* E log(1 − D̂(z_*))]
/// lsgan:     E (D̂(z_prior) − 1)² + Σ_* E D̂(z_*)²
pub fn acca_discriminator_loss_graph<'t>(
    vars: &AccaVars<'t>,
    gan: GanKind,
    x: Var<'t>,
    y: Var<'t>,
    prior: Var<'t>,
) -> Result<Var<'t>> {
    if prior.shape()[0] != x.shape()[0] {
        return Err(ModelError::PriorBatchMismatch {
            batch: x.shape()[0],
            prior: prior.shape()[0],
        });
    }
    let d_prior = vars.disc.forward(prior)?;
    let mut loss = match gan {
        GanKind::Standard => log_clamped(d_prior)?.mean()?.neg()?,
        GanKind::LsGan => d_prior.add_scalar(-1.0)?.square()?.mean()?,
    };
    for z in vars.encodings(x, y)? {
        let d_fake = vars.disc.forward(z)?;
        let term = match gan {
            GanKind::Standard => log_one_minus(d_fake)?.mean()?.neg()?,
            GanKind::LsGan => d_fake.square()?.mean()?,
        };
        loss = loss.add(term)?;
    }
    Ok(loss)
}

/// Discriminator loss value on a batch with explicit prior samples.
pub fn acca_discriminator_loss(
    model: &AccaModel,
    x: &Tensor,
    y: &Tensor,
    prior_samples: &Tensor,
) -> Result<f64> {
    let tape = Tape::new();
    let xv = tape.constant(x.clone());
    let yv = tape.constant(y.clone());
    let pv = tape.constant(prior_samples.clone());
    let vars = model.mount(&tape, AccaPhase::Frozen);
    Ok(acca_discriminator_loss_graph(&vars, model.gan, xv, yv, pv)?.item())
}

/// Encoder-side adversarial objective (minimized over the encoders):
///
/// standard (non-saturating): −Σ_* E log D̂(z_*)
/// lsgan:                      Σ_* E (D̂(z_*) − 1)²
pub fn acca_encoder_adversarial_loss_graph<'t>(
    vars: &AccaVars<'t>,
    gan: GanKind,
    x: Var<'t>,
    y: Var<'t>,
) -> Result<Var<'t>> {
    let mut loss: Option<Var<'t>> = None;
    for z in vars.encodings(x, y)? {
        let d_fake = vars.disc.forward(z)?;
        let term = match gan {
            GanKind::Standard => log_clamped(d_fake)?.mean()?.neg()?,
            GanKind::LsGan => d_fake.add_scalar(-1.0)?.square()?.mean()?,
        };
        loss = Some(match loss {
            Some(acc) => acc.add(term)?,
            None => term,
        });
    }
    Ok(loss.expect("at least two encodings"))
}

/// Encoder adversarial loss value on a batch.
pub fn acca_encoder_adversarial_loss(model: &AccaModel, x: &Tensor, y: &Tensor) -> Result<f64> {
    let tape = Tape::new();
    let xv = tape.constant(x.clone());
    let yv = tape.constant(y.clone());
    let vars = model.mount(&tape, AccaPhase::Frozen);
    Ok(acca_encoder_adversarial_loss_graph(&vars, model.gan, xv, yv)?.item())
}

/// The adversarial regularizer in its analysis form,
/// E log D̂(z_prior) + Σ_* E log(1 − D̂(z_*)); the discriminator maximizes
/// this, so its training loss is the negation.
pub fn acca_r_gan(model: &AccaModel, x: &Tensor, y: &Tensor, prior_samples: &Tensor) -> Result<f64> {
    let loss = acca_discriminator_loss(model, x, y, prior_samples)?;
    Ok(-loss)
}
