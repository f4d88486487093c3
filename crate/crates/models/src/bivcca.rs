//! Bi-VCCA: variational encoders for each view with reparameterized samples
//! and closed-form KL to an isotropic Gaussian prior, combined with weight λ:
//!
//!   λ·[recon(x̂, ŷ | z_x) + KL(q(z|x) ‖ p₀)] +
//!   (1−λ)·[recon(x̂, ŷ | z_y) + KL(q(z|y) ‖ p₀)]
//!
//! At λ = 1 the objective reduces to VCCA from the X view alone.

use ccalign_tensor::{Tape, Tensor, Var};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{ModelError, Result};
use crate::likelihood::Likelihood;
use crate::mlp::{Activation, GaussianEncoder, GaussianEncoderVars, Mlp, MlpSpec, MlpVars, Trainable};

#[derive(Clone, Debug)]
pub struct BivccaModel {
    pub enc_x: GaussianEncoder,
    pub enc_y: GaussianEncoder,
    pub dec_x: Mlp,
    pub dec_y: Mlp,
    pub lambda: f64,
    pub l_samples: usize,
    pub likelihood: Likelihood,
}

#[derive(Clone, Debug)]
pub struct BivccaArch {
    pub d_x: usize,
    pub d_y: usize,
    pub d: usize,
    pub enc_hidden: Vec<usize>,
    pub dec_hidden: Vec<usize>,
    pub activation: Activation,
    pub likelihood: Likelihood,
    pub lambda: f64,
    pub l_samples: usize,
}

impl BivccaArch {
    pub fn build<R: Rng>(&self, rng: &mut R) -> Result<BivccaModel> {
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(ModelError::InvalidSpec(format!(
                "lambda {} outside [0, 1]",
                self.lambda
            )));
        }
        if self.l_samples == 0 {
            return Err(ModelError::InvalidSpec("l_samples must be >= 1".into()));
        }
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
        Ok(BivccaModel {
            enc_x: GaussianEncoder::init(self.d_x, &self.enc_hidden, self.d, self.activation, rng)?,
            enc_y: GaussianEncoder::init(self.d_y, &self.enc_hidden, self.d, self.activation, rng)?,
            dec_x: dec(self.d_x, rng)?,
            dec_y: dec(self.d_y, rng)?,
            lambda: self.lambda,
            l_samples: self.l_samples,
            likelihood: self.likelihood,
        })
    }
}

impl BivccaModel {
    pub fn latent_dim(&self) -> usize {
        self.enc_x.output_dim()
    }

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

    /// Draw the `2·L` noise tensors for one batch from `rng`, X-view stream
    /// first. Freezing these makes the loss deterministic for gradient
    /// checks.
    pub fn draw_noise<R: Rng>(&self, n: usize, rng: &mut R) -> (Vec<Tensor>, Vec<Tensor>) {
        let d = self.latent_dim();
        let mut draw = || -> Tensor {
            Tensor::from_vec(
                vec![n, d],
                (0..n * d).map(|_| StandardNormal.sample(rng)).collect(),
            )
        };
        let eps_x = (0..self.l_samples).map(|_| draw()).collect();
        let eps_y = (0..self.l_samples).map(|_| draw()).collect();
        (eps_x, eps_y)
    }
}

/// Closed-form KL(q ‖ N(0, I)) for a diagonal Gaussian given as mean and
/// log-variance matrices: −½ Σ_j (1 − σ_j² − μ_j² + log σ_j²), summed over
/// dimensions and averaged over the batch.
pub fn kl_diag_gaussian_graph<'t>(mu: Var<'t>, logvar: Var<'t>) -> Result<Var<'t>> {
    let n = mu.shape()[0] as f64;
    let term = logvar
        .add_scalar(1.0)?
        .sub(logvar.exp()?)?
        .sub(mu.square()?)?;
    Ok(term.sum()?.scale(-0.5 / n)?)
}

/// Value form of [`kl_diag_gaussian_graph`] on plain tensors.
pub fn kl_diag_gaussian(mu: &Tensor, logvar: &Tensor) -> Result<f64> {
    if mu.shape() != logvar.shape() {
        return Err(ModelError::DimMismatch {
            what: "kl_diag_gaussian",
            expected: mu.len(),
            got: logvar.len(),
        });
    }
    let tape = Tape::new();
    let m = tape.constant(mu.clone());
    let lv = tape.constant(logvar.clone());
    Ok(kl_diag_gaussian_graph(m, lv)?.item())
}

/// Tape-mounted parameters; `all_vars` matches the order of
/// [`BivccaModel::params_mut`].
pub struct BivccaVars<'t> {
    pub enc_x: GaussianEncoderVars<'t>,
    pub enc_y: GaussianEncoderVars<'t>,
    pub dec_x: MlpVars<'t>,
    pub dec_y: MlpVars<'t>,
}

impl BivccaModel {
    pub fn mount<'t>(&self, tape: &'t Tape, trainable: Trainable) -> BivccaVars<'t> {
        BivccaVars {
            enc_x: self.enc_x.mount(tape, trainable),
            enc_y: self.enc_y.mount(tape, trainable),
            dec_x: self.dec_x.mount(tape, trainable),
            dec_y: self.dec_y.mount(tape, trainable),
        }
    }
}

impl<'t> BivccaVars<'t> {
    pub fn all_vars(&self) -> Vec<Var<'t>> {
        let mut v = self.enc_x.all_vars();
        v.extend(self.enc_y.all_vars());
        v.extend(self.dec_x.all_vars());
        v.extend(self.dec_y.all_vars());
        v
    }
}

/// Build the Bi-VCCA loss with explicit noise tensors (one `[n × d]` tensor
/// per reparameterization sample and view).
pub fn bivcca_loss_graph<'t>(
    model: &BivccaModel,
    vars: &BivccaVars<'t>,
    tape: &'t Tape,
    x: Var<'t>,
    y: Var<'t>,
    eps_x: &[Tensor],
    eps_y: &[Tensor],
) -> Result<Var<'t>> {
    assert_eq!(eps_x.len(), model.l_samples, "need L noise tensors per view");
    assert_eq!(eps_y.len(), model.l_samples);
    let inv_l = 1.0 / model.l_samples as f64;

    let (mu_x, logvar_x) = vars.enc_x.forward(x)?;
    let (mu_y, logvar_y) = vars.enc_y.forward(y)?;
    let mut branches = Vec::with_capacity(2);
    for (mu, logvar, eps) in [(mu_x, logvar_x, eps_x), (mu_y, logvar_y, eps_y)] {
        let sigma = logvar.scale(0.5)?.exp()?;
        let mut recon: Option<Var<'t>> = None;
        for e in eps {
            let z = mu.add(sigma.mul(tape.constant(e.clone()))?)?;
            let term = model
                .likelihood
                .recon_nll(vars.dec_x.forward(z)?, x)?
                .add(model.likelihood.recon_nll(vars.dec_y.forward(z)?, y)?)?;
            recon = Some(match recon {
                Some(acc) => acc.add(term)?,
                None => term,
            });
        }
        let kl = kl_diag_gaussian_graph(mu, logvar)?;
        branches.push(recon.unwrap().scale(inv_l)?.add(kl)?);
    }
    Ok(branches[0]
        .scale(model.lambda)?
        .add(branches[1].scale(1.0 - model.lambda)?)?)
}

/// Loss value on a batch with seed-derived noise.
pub fn bivcca_loss(model: &BivccaModel, x: &Tensor, y: &Tensor, seed: u64) -> Result<f64> {
    use rand_chacha::rand_core::SeedableRng;
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    let (eps_x, eps_y) = model.draw_noise(x.rows(), &mut rng);
    let tape = Tape::new();
    let xv = tape.constant(x.clone());
    let yv = tape.constant(y.clone());
    let vars = model.mount(&tape, Trainable::No);
    Ok(bivcca_loss_graph(model, &vars, &tape, xv, yv, &eps_x, &eps_y)?.item())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn kl_fixed_points() {
        // Standard posterior: 0. Unit mean: ½. σ² = e: (e−2)/2.
        let zero = Tensor::zeros(&[1, 1]);
        let one = Tensor::from_vec(vec![1, 1], vec![1.0]);
        assert!(kl_diag_gaussian(&zero, &zero).unwrap().abs() < 1e-15);
        assert!((kl_diag_gaussian(&one, &zero).unwrap() - 0.5).abs() < 1e-15);
        let e_var = Tensor::from_vec(vec![1, 1], vec![1.0]); // log σ² = 1 → σ² = e
        let got = kl_diag_gaussian(&zero, &e_var).unwrap();
        let expected = (std::f64::consts::E - 2.0) / 2.0;
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
    }

    fn tiny_model(lambda: f64) -> BivccaModel {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        BivccaArch {
            d_x: 3,
            d_y: 2,
            d: 2,
            enc_hidden: vec![4],
            dec_hidden: vec![4],
            activation: Activation::Tanh,
            likelihood: Likelihood::Gaussian,
            lambda,
            l_samples: 2,
        }
        .build(&mut rng)
        .unwrap()
    }

    #[test]
    fn lambda_one_equals_vcca_from_x() {
        let model = tiny_model(1.0);
        let x = Tensor::from_vec(vec![2, 3], vec![0.1, -0.2, 0.3, 0.5, 0.0, -0.4]);
        let y = Tensor::from_vec(vec![2, 2], vec![0.2, 0.1, -0.3, 0.4]);
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let (eps_x, eps_y) = model.draw_noise(2, &mut rng);

        let tape = Tape::new();
        let xv = tape.constant(x.clone());
        let yv = tape.constant(y.clone());
        let mounted = model.mount(&tape, Trainable::No);
        let full = bivcca_loss_graph(&model, &mounted, &tape, xv, yv, &eps_x, &eps_y)
            .unwrap()
            .item();

        // VCCA from the X view alone, built independently.
        let tape2 = Tape::new();
        let xv2 = tape2.constant(x.clone());
        let yv2 = tape2.constant(y.clone());
        let enc = model.enc_x.mount(&tape2, Trainable::No);
        let dx = model.dec_x.mount(&tape2, Trainable::No);
        let dy = model.dec_y.mount(&tape2, Trainable::No);
        let (mu, logvar) = enc.forward(xv2).unwrap();
        let sigma = logvar.scale(0.5).unwrap().exp().unwrap();
        let mut recon: Option<Var<'_>> = None;
        for e in &eps_x {
            let z = mu.add(sigma.mul(tape2.constant(e.clone())).unwrap()).unwrap();
            let t = model
                .likelihood
                .recon_nll(dx.forward(z).unwrap(), xv2)
                .unwrap()
                .add(model.likelihood.recon_nll(dy.forward(z).unwrap(), yv2).unwrap())
                .unwrap();
            recon = Some(match recon {
                Some(acc) => acc.add(t).unwrap(),
                None => t,
            });
        }
        let vcca = recon
            .unwrap()
            .scale(0.5)
            .unwrap()
            .add(kl_diag_gaussian_graph(mu, logvar).unwrap())
            .unwrap()
            .item();
        assert!((full - vcca).abs() < 1e-12, "{full} vs {vcca}");
    }

    #[test]
    fn lambda_one_gives_zero_gradients_on_y_encoder() {
        let model = tiny_model(1.0);
        let x = Tensor::from_vec(vec![2, 3], vec![0.1, -0.2, 0.3, 0.5, 0.0, -0.4]);
        let y = Tensor::from_vec(vec![2, 2], vec![0.2, 0.1, -0.3, 0.4]);
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let (eps_x, eps_y) = model.draw_noise(2, &mut rng);
        let tape = Tape::new();
        let xv = tape.constant(x);
        let yv = tape.constant(y);
        let vars = model.mount(&tape, Trainable::Yes);
        let loss =
            bivcca_loss_graph(&model, &vars, &tape, xv, yv, &eps_x, &eps_y).unwrap();
        let grads = tape.backward(loss).unwrap();
        for v in vars.enc_y.all_vars() {
            let g = grads.wrt(v).unwrap();
            assert!(g.data().iter().all(|v| *v == 0.0), "nonzero grad");
        }
    }
}
