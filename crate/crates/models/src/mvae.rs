//! Multi-view autoencoder: deterministic encoders F, G and decoders F⁻¹, G⁻¹
//! trained on the sum of self- and cross-view squared reconstruction errors.
//! No prior regularization.

use ccalign_tensor::{Tape, Tensor, Var};
use rand::Rng;

use crate::error::Result;
use crate::mlp::{Activation, Mlp, MlpSpec, MlpVars, Trainable};

#[derive(Clone, Debug)]
pub struct MvaeModel {
    pub enc_x: Mlp,
    pub enc_y: Mlp,
    pub dec_x: Mlp,
    pub dec_y: Mlp,
}

#[derive(Clone, Debug)]
pub struct MvaeArch {
    pub d_x: usize,
    pub d_y: usize,
    pub d: usize,
    pub enc_hidden: Vec<usize>,
    pub dec_hidden: Vec<usize>,
    pub activation: Activation,
    /// Output activation of the decoders (identity for unbounded views,
    /// sigmoid for pixels).
    pub decoder_output: Activation,
}

impl MvaeArch {
    pub fn build<R: Rng>(&self, rng: &mut R) -> Result<MvaeModel> {
        let enc = |input: usize, rng: &mut R| {
            Mlp::init(
                MlpSpec::chain(input, &self.enc_hidden, self.d, self.activation, Activation::Identity),
                rng,
            )
        };
        let dec = |output: usize, rng: &mut R| {
            Mlp::init(
                MlpSpec::chain(self.d, &self.dec_hidden, output, self.activation, self.decoder_output),
                rng,
            )
        };
        Ok(MvaeModel {
            enc_x: enc(self.d_x, rng)?,
            enc_y: enc(self.d_y, rng)?,
            dec_x: dec(self.d_x, rng)?,
            dec_y: dec(self.d_y, rng)?,
        })
    }
}

impl MvaeModel {
    pub fn params_mut(&mut self) -> Vec<&mut Tensor> {
        let mut p = self.enc_x.params_mut();
        p.extend(self.enc_y.params_mut());
        p.extend(self.dec_x.params_mut());
        p.extend(self.dec_y.params_mut());
        p
    }

    pub fn named_params(&self) -> Vec<(String, &Tensor)> {
        let mut out = self.enc_x.named_params("enc_x");
        out.extend(self.enc_y.named_params("enc_y"));
        out.extend(self.dec_x.named_params("dec_x"));
        out.extend(self.dec_y.named_params("dec_y"));
        out
    }

    pub fn load_named(&mut self, entries: &[(String, Tensor)]) -> Result<()> {
        self.enc_x.load_named("enc_x", entries)?;
        self.enc_y.load_named("enc_y", entries)?;
        self.dec_x.load_named("dec_x", entries)?;
        self.dec_y.load_named("dec_y", entries)
    }
}

/// Tape-mounted parameters; `all_vars` matches the order of
/// [`MvaeModel::params_mut`].
pub struct MvaeVars<'t> {
    pub enc_x: MlpVars<'t>,
    pub enc_y: MlpVars<'t>,
    pub dec_x: MlpVars<'t>,
    pub dec_y: MlpVars<'t>,
}

impl MvaeModel {
    pub fn mount<'t>(&self, tape: &'t Tape, trainable: Trainable) -> MvaeVars<'t> {
        MvaeVars {
            enc_x: self.enc_x.mount(tape, trainable),
            enc_y: self.enc_y.mount(tape, trainable),
            dec_x: self.dec_x.mount(tape, trainable),
            dec_y: self.dec_y.mount(tape, trainable),
        }
    }
}

impl<'t> MvaeVars<'t> {
    pub fn all_vars(&self) -> Vec<ccalign_tensor::Var<'t>> {
        let mut v = self.enc_x.all_vars();
        v.extend(self.enc_y.all_vars());
        v.extend(self.dec_x.all_vars());
        v.extend(self.dec_y.all_vars());
        v
    }
}

/// Mean over the batch of the four squared-error terms
/// ‖x−F⁻¹(F(x))‖² + ‖x−F⁻¹(G(y))‖² + ‖y−G⁻¹(G(y))‖² + ‖y−G⁻¹(F(x))‖².
pub fn mvae_loss_graph<'t>(vars: &MvaeVars<'t>, x: Var<'t>, y: Var<'t>) -> Result<Var<'t>> {
    let n = x.shape()[0] as f64;
    let z_x = vars.enc_x.forward(x)?;
    let z_y = vars.enc_y.forward(y)?;
    let sq = |pred: Var<'t>, target: Var<'t>| -> Result<Var<'t>> {
        Ok(pred.sub(target)?.square()?.sum()?)
    };
    let total = sq(vars.dec_x.forward(z_x)?, x)?
        .add(sq(vars.dec_x.forward(z_y)?, x)?)?
        .add(sq(vars.dec_y.forward(z_y)?, y)?)?
        .add(sq(vars.dec_y.forward(z_x)?, y)?)?;
    Ok(total.scale(1.0 / n)?)
}

/// Loss value on a batch outside any training graph.
pub fn mvae_loss(model: &MvaeModel, x: &Tensor, y: &Tensor) -> Result<f64> {
    let tape = Tape::new();
    let xv = tape.constant(x.clone());
    let yv = tape.constant(y.clone());
    let vars = model.mount(&tape, Trainable::No);
    Ok(mvae_loss_graph(&vars, xv, yv)?.item())
}
