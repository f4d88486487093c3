//! Central finite-difference verification of every trainable loss: MVAE,
//! Bi-VCCA with frozen reparameterization noise, the ACCA reconstruction
//! loss, and both adversarial losses. The numeric side only re-runs forward
//! evaluations, so it stays independent of the backward pass it checks.

use ccalign_models::{
    acca_discriminator_loss_graph, acca_encoder_adversarial_loss_graph,
    acca_reconstruction_loss_graph, bivcca_loss_graph, mvae_loss_graph, AccaArch, AccaModel,
    AccaPhase, Activation, BivccaArch, BivccaModel, GanKind, Likelihood, MvaeArch, MvaeModel,
    PriorSpec, Trainable,
};
use ccalign_tensor::{Tape, Tensor};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

const FD_H: f64 = 1e-5;
const TOL: f64 = 1e-4;

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn rand_batch(rng: &mut ChaCha12Rng, n: usize, d: usize, lo: f64, hi: f64) -> Tensor {
    Tensor::from_vec(
        vec![n, d],
        (0..n * d).map(|_| rng.random_range(lo..hi)).collect(),
    )
}

/// Generic finite-difference sweep. `analytic` returns (loss, one gradient
/// tensor per parameter); `forward` returns the loss for a perturbed clone;
/// `params` exposes the parameters in the same order as `analytic`'s grads.
fn check_gradients<M: Clone>(
    model: &M,
    params: &dyn Fn(&mut M) -> Vec<&mut Tensor>,
    analytic: &dyn Fn(&M) -> Vec<Tensor>,
    forward: &dyn Fn(&M) -> f64,
    label: &str,
) {
    let grads = analytic(model);
    let n_params = {
        let mut m = model.clone();
        params(&mut m).len()
    };
    assert_eq!(grads.len(), n_params, "{label}: gradient count");
    for pi in 0..n_params {
        for i in 0..grads[pi].len() {
            let mut plus = model.clone();
            params(&mut plus)[pi].data_mut()[i] += FD_H;
            let mut minus = model.clone();
            params(&mut minus)[pi].data_mut()[i] -= FD_H;
            let numeric = (forward(&plus) - forward(&minus)) / (2.0 * FD_H);
            let a = grads[pi].data()[i];
            assert!(
                rel_err(a, numeric) < TOL,
                "{label}: param {pi} elem {i}: analytic {a} vs numeric {numeric}"
            );
        }
    }
}

fn dims_for(case: usize) -> (usize, usize, usize, usize) {
    // (d_x, d_y, d, batch) — tiny, so the FD sweep stays fast.
    (2 + case % 3, 2 + (case / 3) % 2, 2 + case % 2, 2 + case % 3)
}

#[test]
fn mvae_loss_matches_finite_differences() {
    for case in 0..4 {
        let mut rng = ChaCha12Rng::seed_from_u64(100 + case as u64);
        let (d_x, d_y, d, n) = dims_for(case);
        let model = MvaeArch {
            d_x,
            d_y,
            d,
            enc_hidden: vec![4],
            dec_hidden: vec![3],
            activation: Activation::Tanh,
            decoder_output: Activation::Identity,
        }
        .build(&mut rng)
        .unwrap();
        let x = rand_batch(&mut rng, n, d_x, -1.0, 1.0);
        let y = rand_batch(&mut rng, n, d_y, -1.0, 1.0);
        check_gradients(
            &model,
            &|m: &mut MvaeModel| m.params_mut(),
            &|m: &MvaeModel| {
                let tape = Tape::new();
                let xv = tape.constant(x.clone());
                let yv = tape.constant(y.clone());
                let vars = m.mount(&tape, Trainable::Yes);
                let loss = mvae_loss_graph(&vars, xv, yv).unwrap();
                let grads = tape.backward(loss).unwrap();
                vars.all_vars()
                    .into_iter()
                    .map(|v| grads.wrt(v).unwrap().clone())
                    .collect()
            },
            &|m: &MvaeModel| ccalign_models::mvae_loss(m, &x, &y).unwrap(),
            &format!("mvae case {case}"),
        );
    }
}

#[test]
fn bivcca_loss_matches_finite_differences_with_frozen_noise() {
    for case in 0..4 {
        let mut rng = ChaCha12Rng::seed_from_u64(200 + case as u64);
        let (d_x, d_y, d, n) = dims_for(case);
        let model = BivccaArch {
            d_x,
            d_y,
            d,
            enc_hidden: vec![4],
            dec_hidden: vec![3],
            activation: Activation::Tanh,
            likelihood: if case % 2 == 0 {
                Likelihood::Gaussian
            } else {
                Likelihood::Bernoulli
            },
            lambda: [0.0, 0.3, 0.8, 1.0][case % 4],
            l_samples: 1 + case % 2,
        }
        .build(&mut rng)
        .unwrap();
        let (lo, hi) = match model.likelihood {
            Likelihood::Gaussian => (-1.0, 1.0),
            Likelihood::Bernoulli => (0.05, 0.95),
        };
        let x = rand_batch(&mut rng, n, d_x, lo, hi);
        let y = rand_batch(&mut rng, n, d_y, lo, hi);
        let (eps_x, eps_y) = model.draw_noise(n, &mut rng);
        check_gradients(
            &model,
            &|m: &mut BivccaModel| m.params_mut(),
            &|m: &BivccaModel| {
                let tape = Tape::new();
                let xv = tape.constant(x.clone());
                let yv = tape.constant(y.clone());
                let vars = m.mount(&tape, Trainable::Yes);
                let loss =
                    bivcca_loss_graph(m, &vars, &tape, xv, yv, &eps_x, &eps_y).unwrap();
                let grads = tape.backward(loss).unwrap();
                vars.all_vars()
                    .into_iter()
                    .map(|v| grads.wrt(v).unwrap().clone())
                    .collect()
            },
            &|m: &BivccaModel| {
                let tape = Tape::new();
                let xv = tape.constant(x.clone());
                let yv = tape.constant(y.clone());
                let vars = m.mount(&tape, Trainable::No);
                bivcca_loss_graph(m, &vars, &tape, xv, yv, &eps_x, &eps_y)
                    .unwrap()
                    .item()
            },
            &format!("bivcca case {case}"),
        );
    }
}

fn acca_model(case: usize, rng: &mut ChaCha12Rng) -> (AccaModel, Tensor, Tensor, Tensor) {
    let (d_x, d_y, d, n) = dims_for(case);
    let likelihood = if case % 2 == 0 {
        Likelihood::Gaussian
    } else {
        Likelihood::Bernoulli
    };
    let model = AccaArch {
        d_x,
        d_y,
        d,
        enc_hidden: vec![4],
        dec_hidden: vec![3],
        disc_hidden: vec![4],
        activation: Activation::Tanh,
        likelihood,
        gan: if case % 3 == 0 {
            GanKind::LsGan
        } else {
            GanKind::Standard
        },
        prior: PriorSpec::IsotropicGaussian { dim: d },
        complementary_view: case % 4 != 3,
    }
    .build(rng)
    .unwrap();
    let (lo, hi) = match likelihood {
        Likelihood::Gaussian => (-1.0, 1.0),
        Likelihood::Bernoulli => (0.05, 0.95),
    };
    let x = rand_batch(rng, n, d_x, lo, hi);
    let y = rand_batch(rng, n, d_y, lo, hi);
    let prior = model.prior.sample(n, rng);
    (model, x, y, prior)
}

#[test]
fn acca_reconstruction_loss_matches_finite_differences() {
    for case in 0..4 {
        let mut rng = ChaCha12Rng::seed_from_u64(300 + case as u64);
        let (model, x, y, _) = acca_model(case, &mut rng);
        check_gradients(
            &model,
            &|m: &mut AccaModel| m.reconstruction_params_mut(),
            &|m: &AccaModel| {
                let tape = Tape::new();
                let xv = tape.constant(x.clone());
                let yv = tape.constant(y.clone());
                let vars = m.mount(&tape, AccaPhase::Reconstruction);
                let loss =
                    acca_reconstruction_loss_graph(&vars, m.likelihood, xv, yv).unwrap();
                let grads = tape.backward(loss).unwrap();
                vars.reconstruction_vars()
                    .into_iter()
                    .map(|v| grads.wrt(v).unwrap().clone())
                    .collect()
            },
            &|m: &AccaModel| ccalign_models::acca_reconstruction_loss(m, &x, &y).unwrap(),
            &format!("acca recon case {case}"),
        );
    }
}

#[test]
fn acca_discriminator_loss_matches_finite_differences() {
    for case in 0..4 {
        let mut rng = ChaCha12Rng::seed_from_u64(400 + case as u64);
        let (model, x, y, prior) = acca_model(case, &mut rng);
        check_gradients(
            &model,
            &|m: &mut AccaModel| m.discriminator_params_mut(),
            &|m: &AccaModel| {
                let tape = Tape::new();
                let xv = tape.constant(x.clone());
                let yv = tape.constant(y.clone());
                let pv = tape.constant(prior.clone());
                let vars = m.mount(&tape, AccaPhase::Discriminator);
                let loss =
                    acca_discriminator_loss_graph(&vars, m.gan, xv, yv, pv).unwrap();
                let grads = tape.backward(loss).unwrap();
                vars.discriminator_vars()
                    .into_iter()
                    .map(|v| grads.wrt(v).unwrap().clone())
                    .collect()
            },
            &|m: &AccaModel| {
                ccalign_models::acca_discriminator_loss(m, &x, &y, &prior).unwrap()
            },
            &format!("acca disc case {case}"),
        );
    }
}

#[test]
fn acca_encoder_adversarial_loss_matches_finite_differences() {
    for case in 0..4 {
        let mut rng = ChaCha12Rng::seed_from_u64(500 + case as u64);
        let (model, x, y, _) = acca_model(case, &mut rng);
        check_gradients(
            &model,
            &|m: &mut AccaModel| m.encoder_params_mut(),
            &|m: &AccaModel| {
                let tape = Tape::new();
                let xv = tape.constant(x.clone());
                let yv = tape.constant(y.clone());
                let vars = m.mount(&tape, AccaPhase::EncoderAdversarial);
                let loss =
                    acca_encoder_adversarial_loss_graph(&vars, m.gan, xv, yv).unwrap();
                let grads = tape.backward(loss).unwrap();
                vars.encoder_vars()
                    .into_iter()
                    .map(|v| grads.wrt(v).unwrap().clone())
                    .collect()
            },
            &|m: &AccaModel| {
                ccalign_models::acca_encoder_adversarial_loss(m, &x, &y).unwrap()
            },
            &format!("acca encoder adv case {case}"),
        );
    }
}
