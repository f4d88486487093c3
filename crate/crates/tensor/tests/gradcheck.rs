//! Central finite-difference checks for every primitive and for a small MLP
//! loss. The numeric differentiator only re-evaluates forward passes, so it
//! stays independent of the backward implementation it verifies.

use ccalign_tensor::{Result, Tape, Tensor, Var};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

const FD_H: f64 = 1e-5;
const TOL: f64 = 1e-4;

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Check analytic gradients of `build` against central differences for every
/// element of every leaf.
fn grad_check<F>(leaves: &[Tensor], build: F)
where
    F: for<'t> Fn(&'t Tape, &[Var<'t>]) -> Result<Var<'t>>,
{
    let tape = Tape::new();
    let vars: Vec<Var> = leaves
        .iter()
        .map(|t| tape.leaf(&t.clone().requires_grad(true)))
        .collect();
    let root = build(&tape, &vars).expect("forward failed");
    let grads = tape.backward(root).expect("backward failed");

    let eval = |perturbed: &[Tensor]| -> f64 {
        let t = Tape::new();
        let vs: Vec<Var> = perturbed.iter().map(|x| t.leaf(x)).collect();
        build(&t, &vs).expect("forward failed").item()
    };

    for (li, leaf) in leaves.iter().enumerate() {
        let analytic = grads.wrt(vars[li]).expect("missing gradient");
        for i in 0..leaf.len() {
            let mut plus = leaves.to_vec();
            plus[li].data_mut()[i] += FD_H;
            let mut minus = leaves.to_vec();
            minus[li].data_mut()[i] -= FD_H;
            let numeric = (eval(&plus) - eval(&minus)) / (2.0 * FD_H);
            let a = analytic.data()[i];
            assert!(
                rel_err(a, numeric) < TOL,
                "leaf {li} elem {i}: analytic {a} vs numeric {numeric}"
            );
        }
    }
}

fn rand_tensor(rng: &mut ChaCha12Rng, shape: &[usize], lo: f64, hi: f64) -> Tensor {
    let n: usize = shape.iter().product();
    Tensor::from_vec(
        shape.to_vec(),
        (0..n).map(|_| rng.random_range(lo..hi)).collect(),
    )
}

/// Keep samples away from the activation kink so the finite difference is
/// valid.
fn rand_tensor_off_kink(rng: &mut ChaCha12Rng, shape: &[usize]) -> Tensor {
    let n: usize = shape.iter().product();
    Tensor::from_vec(
        shape.to_vec(),
        (0..n)
            .map(|_| {
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                sign * rng.random_range(0.05..2.0)
            })
            .collect(),
    )
}

#[test]
fn primitives_match_finite_differences_100_cases() {
    let mut rng = ChaCha12Rng::seed_from_u64(7);
    for case in 0..100 {
        let m = 1 + case % 3;
        let k = 1 + (case / 3) % 3;
        let n = 1 + (case / 9) % 3;

        let a = rand_tensor(&mut rng, &[m, k], -2.0, 2.0);
        let b = rand_tensor(&mut rng, &[k, n], -2.0, 2.0);
        grad_check(&[a, b], |_, v| v[0].matmul(v[1])?.square()?.mean());

        let x = rand_tensor(&mut rng, &[m, n], -2.0, 2.0);
        let y = rand_tensor(&mut rng, &[m, n], -2.0, 2.0);
        grad_check(&[x.clone(), y.clone()], |_, v| v[0].add(v[1])?.square()?.sum());
        grad_check(&[x.clone(), y.clone()], |_, v| v[0].sub(v[1])?.square()?.mean());
        grad_check(&[x.clone(), y.clone()], |_, v| v[0].mul(v[1])?.sum());
        let bias = rand_tensor(&mut rng, &[n], -1.0, 1.0);
        grad_check(&[x.clone(), bias], |_, v| {
            v[0].add_bias(v[1])?.square()?.mean()
        });

        let k1 = rand_tensor_off_kink(&mut rng, &[m, n]);
        grad_check(&[k1.clone()], |_, v| v[0].relu()?.square()?.sum());
        grad_check(&[k1.clone()], |_, v| v[0].leaky_relu(0.2)?.square()?.sum());
        grad_check(&[x.clone()], |_, v| v[0].tanh()?.sum());
        grad_check(&[x.clone()], |_, v| v[0].sigmoid()?.sum());
        grad_check(&[x.clone()], |_, v| v[0].exp()?.mean());
        grad_check(&[x.clone()], |_, v| v[0].square()?.mean());
        grad_check(&[x.clone()], |_, v| v[0].scale(1.7)?.sum());
        grad_check(&[x.clone()], |_, v| v[0].add_scalar(-0.3)?.square()?.sum());
        grad_check(&[x.clone()], |_, v| v[0].neg()?.exp()?.mean());

        let pos = rand_tensor(&mut rng, &[m, n], 0.1, 3.0);
        grad_check(&[pos], |_, v| v[0].log()?.sum());

        let c1 = rand_tensor(&mut rng, &[m, n], -1.0, 1.0);
        let c2 = rand_tensor(&mut rng, &[m, 2], -1.0, 1.0);
        grad_check(&[c1.clone(), c2.clone()], |_, v| {
            v[0].concat(v[1], 1)?.square()?.mean()
        });
        let r2 = rand_tensor(&mut rng, &[2, n], -1.0, 1.0);
        grad_check(&[c1.clone(), r2], |_, v| {
            v[0].concat(v[1], 0)?.square()?.sum()
        });
        if n > 1 {
            grad_check(&[c1], |_, v| v[0].slice(1, 0, n - 1)?.square()?.sum());
        }
    }
}

#[test]
fn two_layer_mlp_loss_matches_finite_differences() {
    // 8-dim input through two layers and a squared-error loss, per the
    // stated oracle: agreement within 1e-4 relative at h = 1e-5.
    let mut rng = ChaCha12Rng::seed_from_u64(11);
    for _ in 0..5 {
        let x = rand_tensor(&mut rng, &[4, 8], -1.0, 1.0);
        let w1 = rand_tensor(&mut rng, &[8, 6], -0.5, 0.5);
        let b1 = rand_tensor(&mut rng, &[6], -0.1, 0.1);
        let w2 = rand_tensor(&mut rng, &[6, 3], -0.5, 0.5);
        let b2 = rand_tensor(&mut rng, &[3], -0.1, 0.1);
        let target = rand_tensor(&mut rng, &[4, 3], -1.0, 1.0);
        grad_check(&[w1, b1, w2, b2], |tape, v| {
            let xv = tape.constant(x.clone());
            let tv = tape.constant(target.clone());
            let h = xv.matmul(v[0])?.add_bias(v[1])?.tanh()?;
            let out = h.matmul(v[2])?.add_bias(v[3])?;
            out.sub(tv)?.square()?.mean()
        });
    }
}

#[test]
fn adam_runs_are_bit_identical_under_same_seed() {
    let run = || -> Vec<f64> {
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let mut w = rand_tensor(&mut rng, &[4, 4], -1.0, 1.0).requires_grad(true);
        let mut state = ccalign_tensor::AdamState::new(&[&w], 1e-2);
        for _ in 0..25 {
            let x = rand_tensor(&mut rng, &[8, 4], -1.0, 1.0);
            let tape = Tape::new();
            let wv = tape.leaf(&w);
            let xv = tape.constant(x);
            let loss = xv.matmul(wv).unwrap().square().unwrap().mean().unwrap();
            let grads = tape.backward(loss).unwrap();
            let g = grads.wrt(wv).unwrap().clone();
            state.step(&mut [&mut w], &[&g]).unwrap();
        }
        w.data().to_vec()
    };
    let (a, b) = (run(), run());
    assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
}

#[test]
fn checkpoint_roundtrip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha12Rng::seed_from_u64(3);
    let named: Vec<(String, Tensor)> = vec![
        ("enc.w0".into(), rand_tensor(&mut rng, &[5, 3], -1.0, 1.0)),
        ("enc.b0".into(), rand_tensor(&mut rng, &[3], -1.0, 1.0)),
        ("dec.w0".into(), rand_tensor(&mut rng, &[3, 5], -1.0, 1.0)),
    ];
    let refs: Vec<(String, &Tensor)> = named.iter().map(|(n, t)| (n.clone(), t)).collect();
    ccalign_tensor::checkpoint::save_params(dir.path(), "model", &refs).unwrap();
    let loaded = ccalign_tensor::checkpoint::load_params(dir.path(), "model").unwrap();
    assert_eq!(loaded.len(), named.len());
    for ((n0, t0), (n1, t1)) in named.iter().zip(&loaded) {
        assert_eq!(n0, n1);
        assert_eq!(t0.shape(), t1.shape());
        assert!(t0
            .data()
            .iter()
            .zip(t1.data())
            .all(|(a, b)| a.to_bits() == b.to_bits()));
    }
}

#[test]
fn checkpoint_rejects_truncated_bin() {
    let dir = tempfile::tempdir().unwrap();
    let t = Tensor::from_vec(vec![4], vec![1.0, 2.0, 3.0, 4.0]);
    ccalign_tensor::checkpoint::save_params(dir.path(), "m", &[("w".into(), &t)]).unwrap();
    let bin_path = dir.path().join("m.bin");
    let bytes = std::fs::read(&bin_path).unwrap();
    std::fs::write(&bin_path, &bytes[..16]).unwrap();
    assert!(ccalign_tensor::checkpoint::load_params(dir.path(), "m").is_err());
}
