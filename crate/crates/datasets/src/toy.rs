//! The simulated two-view dataset: a shared 10-d latent vector drawn from a
//! scalar mixture feeds a linear map for view X and an elementwise-squared
//! map for view Y, giving the views a purely nonlinear dependency.

use ccalign_tensor::Tensor;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::Distribution;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::gmm::{sample_gmm, GmmSpec};
use crate::multiview::{MultiViewDataset, SplitTag};

pub const TOY_LATENT_DIM: usize = 10;
pub const TOY_VIEW_DIM: usize = 50;

/// Fixed random projections W1, W2 ∈ ℝ^{10×50}; bit-identical regeneration
/// from the stored seed.
#[derive(Clone, Debug)]
pub struct ToyProjections {
    pub w1: Tensor,
    pub w2: Tensor,
    pub seed: u64,
}

impl ToyProjections {
    pub fn generate(seed: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut draw = |n: usize| -> Vec<f64> {
            (0..n)
                .map(|_| StandardNormal.sample(&mut rng))
                .collect()
        };
        let w1 = Tensor::from_vec(
            vec![TOY_LATENT_DIM, TOY_VIEW_DIM],
            draw(TOY_LATENT_DIM * TOY_VIEW_DIM),
        );
        let w2 = Tensor::from_vec(
            vec![TOY_LATENT_DIM, TOY_VIEW_DIM],
            draw(TOY_LATENT_DIM * TOY_VIEW_DIM),
        );
        Self { w1, w2, seed }
    }
}

/// Latent draws for one split: z ∼ mixture per dimension, X = zᵀW1,
/// Y = (z⊙z)ᵀW2. Returns the dataset together with the latent matrix so
/// callers can verify against the generating source.
fn synthesize(
    n: usize,
    spec: &GmmSpec,
    proj: &ToyProjections,
    seed: u64,
    split: SplitTag,
) -> Result<(MultiViewDataset, Tensor)> {
    let z = sample_gmm(spec, n, TOY_LATENT_DIM, seed)?;
    let x = matmul(&z, &proj.w1);
    let z_sq = Tensor::from_vec(
        z.shape().to_vec(),
        z.data().iter().map(|v| v * v).collect(),
    );
    let y = matmul(&z_sq, &proj.w2);
    Ok((MultiViewDataset::new(x, y, None, split)?, z))
}

/// Paired train/test splits drawn independently from the same mixture and
/// projected through the same fixed W1, W2.
pub fn make_toy(
    n_train: usize,
    n_test: usize,
    spec: &GmmSpec,
    proj: &ToyProjections,
    seed: u64,
) -> Result<(MultiViewDataset, MultiViewDataset)> {
    let (train, _) = synthesize(n_train, spec, proj, seed, SplitTag::Train)?;
    let (test, _) = synthesize(n_test, spec, proj, seed.wrapping_add(1), SplitTag::Test)?;
    Ok((train, test))
}

/// Variant exposing the latent draws; used by generate-and-verify tests.
pub fn make_toy_with_latents(
    n_train: usize,
    n_test: usize,
    spec: &GmmSpec,
    proj: &ToyProjections,
    seed: u64,
) -> Result<((MultiViewDataset, Tensor), (MultiViewDataset, Tensor))> {
    Ok((
        synthesize(n_train, spec, proj, seed, SplitTag::Train)?,
        synthesize(n_test, spec, proj, seed.wrapping_add(1), SplitTag::Test)?,
    ))
}

fn matmul(a: &Tensor, b: &Tensor) -> Tensor {
    let (m, k) = (a.rows(), a.cols());
    let n = b.cols();
    debug_assert_eq!(k, b.rows());
    let mut out = vec![0.0; m * n];
    for i in 0..m {
        let arow = a.row(i);
        let orow = &mut out[i * n..(i + 1) * n];
        for (p, &av) in arow.iter().enumerate() {
            let brow = b.row(p);
            for j in 0..n {
                orow[j] += av * brow[j];
            }
        }
    }
    Tensor::from_vec(vec![m, n], out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_sizes_follow_request() {
        let proj = ToyProjections::generate(3);
        let (train, test) =
            make_toy(80, 20, &GmmSpec::toy_prior(), &proj, 11).unwrap();
        assert_eq!(train.n(), 80);
        assert_eq!(test.n(), 20);
        assert_eq!(train.dim_x(), 50);
        assert_eq!(train.dim_y(), 50);
        assert_eq!(train.split(), SplitTag::Train);
        assert_eq!(test.split(), SplitTag::Test);
    }

    #[test]
    fn zero_projection_gives_zero_view() {
        let mut proj = ToyProjections::generate(3);
        proj.w2 = Tensor::zeros(&[TOY_LATENT_DIM, TOY_VIEW_DIM]);
        let (train, _) = make_toy(10, 2, &GmmSpec::toy_prior(), &proj, 11).unwrap();
        assert!(train.y().data().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn regeneration_is_bit_identical() {
        let p1 = ToyProjections::generate(42);
        let p2 = ToyProjections::generate(42);
        assert_eq!(p1.w1, p2.w1);
        assert_eq!(p1.w2, p2.w2);
        let spec = GmmSpec::toy_prior();
        let (a, _) = make_toy(100, 10, &spec, &p1, 9).unwrap();
        let (b, _) = make_toy(100, 10, &spec, &p2, 9).unwrap();
        assert_eq!(a.x(), b.x());
        assert_eq!(a.y(), b.y());
    }
}
