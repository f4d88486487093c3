//! Plain fully-connected networks over the tape, plus the Gaussian-head
//! encoder used by the variational models.

use ccalign_tensor::{Tape, Tensor, Var};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Activation {
    Identity,
    Relu,
    /// Leaky ReLU; the conventional slope 0.2 is used everywhere unless
    /// overridden.
    LeakyRelu {
        slope: f64,
    },
    Tanh,
    Sigmoid,
}

impl Activation {
    pub fn leaky_default() -> Self {
        Activation::LeakyRelu { slope: 0.2 }
    }

    pub fn apply<'t>(&self, x: Var<'t>) -> ccalign_tensor::Result<Var<'t>> {
        match self {
            Activation::Identity => Ok(x),
            Activation::Relu => x.relu(),
            Activation::LeakyRelu { slope } => x.leaky_relu(*slope),
            Activation::Tanh => x.tanh(),
            Activation::Sigmoid => x.sigmoid(),
        }
    }
}

/// Widths of the full layer chain (input, hidden..., output) together with
/// the hidden and output activations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlpSpec {
    pub widths: Vec<usize>,
    pub hidden: Activation,
    pub output: Activation,
}

impl MlpSpec {
    pub fn new(widths: Vec<usize>, hidden: Activation, output: Activation) -> Result<Self> {
        let spec = Self {
            widths,
            hidden,
            output,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.widths.len() < 2 {
            return Err(ModelError::InvalidSpec(format!(
                "need at least input and output widths, got {:?}",
                self.widths
            )));
        }
        if self.widths.iter().any(|w| *w == 0) {
            return Err(ModelError::InvalidSpec(format!(
                "zero width in {:?}",
                self.widths
            )));
        }
        Ok(())
    }

    pub fn input_dim(&self) -> usize {
        self.widths[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.widths.last().unwrap()
    }

    /// Convenience: `input -> hidden... -> output` chain.
    pub fn chain(
        input: usize,
        hidden_widths: &[usize],
        output: usize,
        hidden: Activation,
        out_act: Activation,
    ) -> Self {
        let mut widths = Vec::with_capacity(hidden_widths.len() + 2);
        widths.push(input);
        widths.extend_from_slice(hidden_widths);
        widths.push(output);
        Self {
            widths,
            hidden,
            output: out_act,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trainable {
    Yes,
    No,
}

/// A fully-connected network. Parameters carry `requires_grad` so mounting
/// them on a tape in trainable mode records gradients.
#[derive(Clone, Debug)]
pub struct Mlp {
    pub spec: MlpSpec,
    weights: Vec<Tensor>,
    biases: Vec<Tensor>,
}

impl Mlp {
    pub fn init<R: Rng>(spec: MlpSpec, rng: &mut R) -> Result<Self> {
        spec.validate()?;
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for pair in spec.widths.windows(2) {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            weights.push(Tensor::glorot_uniform(fan_in, fan_out, rng).requires_grad(true));
            biases.push(Tensor::zeros(&[fan_out]).requires_grad(true));
        }
        Ok(Self {
            spec,
            weights,
            biases,
        })
    }

    pub fn n_layers(&self) -> usize {
        self.weights.len()
    }

    pub fn params(&self) -> Vec<&Tensor> {
        self.weights.iter().chain(self.biases.iter()).collect()
    }

    pub fn params_mut(&mut self) -> Vec<&mut Tensor> {
        self.weights
            .iter_mut()
            .chain(self.biases.iter_mut())
            .collect()
    }

    /// `(name, tensor)` pairs in a stable order, prefixed for checkpoints.
    pub fn named_params(&self, prefix: &str) -> Vec<(String, &Tensor)> {
        let mut out = Vec::new();
        for (i, w) in self.weights.iter().enumerate() {
            out.push((format!("{prefix}.w{i}"), w));
        }
        for (i, b) in self.biases.iter().enumerate() {
            out.push((format!("{prefix}.b{i}"), b));
        }
        out
    }

    /// Overwrite parameters from checkpoint entries produced by
    /// [`Mlp::named_params`] with the same prefix.
    pub fn load_named(&mut self, prefix: &str, entries: &[(String, Tensor)]) -> Result<()> {
        for (i, w) in self.weights.iter_mut().enumerate() {
            *w = lookup(entries, &format!("{prefix}.w{i}"), w.shape())?;
        }
        for (i, b) in self.biases.iter_mut().enumerate() {
            *b = lookup(entries, &format!("{prefix}.b{i}"), b.shape())?;
        }
        Ok(())
    }

    pub fn mount<'t>(&self, tape: &'t Tape, trainable: Trainable) -> MlpVars<'t> {
        let mount_one = |t: &Tensor| match trainable {
            Trainable::Yes => tape.leaf(t),
            Trainable::No => tape.constant(t.clone()),
        };
        MlpVars {
            weights: self.weights.iter().map(mount_one).collect(),
            biases: self.biases.iter().map(mount_one).collect(),
            hidden: self.spec.hidden,
            output: self.spec.output,
        }
    }

    /// Forward pass outside any training graph.
    pub fn forward_plain(&self, x: &Tensor) -> Result<Tensor> {
        let tape = Tape::new();
        let xv = tape.constant(x.clone());
        let out = self.mount(&tape, Trainable::No).forward(xv)?;
        Ok(out.value())
    }
}

fn lookup(entries: &[(String, Tensor)], name: &str, shape: &[usize]) -> Result<Tensor> {
    let t = entries
        .iter()
        .find(|(n, _)| n == name)
        .map(|(_, t)| t.clone())
        .ok_or_else(|| ModelError::InvalidSpec(format!("checkpoint missing `{name}`")))?;
    if t.shape() != shape {
        return Err(ModelError::InvalidSpec(format!(
            "checkpoint entry `{name}` has shape {:?}, model expects {:?}",
            t.shape(),
            shape
        )));
    }
    Ok(t.requires_grad(true))
}

/// Tape-mounted network parameters.
pub struct MlpVars<'t> {
    pub weights: Vec<Var<'t>>,
    pub biases: Vec<Var<'t>>,
    hidden: Activation,
    output: Activation,
}

impl<'t> MlpVars<'t> {
    pub fn forward(&self, x: Var<'t>) -> Result<Var<'t>> {
        let last = self.weights.len() - 1;
        let mut h = x;
        for (i, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            h = h.matmul(*w)?.add_bias(*b)?;
            let act = if i == last { self.output } else { self.hidden };
            h = act.apply(h)?;
        }
        Ok(h)
    }

    pub fn all_vars(&self) -> Vec<Var<'t>> {
        self.weights
            .iter()
            .chain(self.biases.iter())
            .copied()
            .collect()
    }
}

/// Encoder with a shared trunk and two linear heads producing the mean and
/// log-variance of a diagonal Gaussian posterior.
#[derive(Clone, Debug)]
pub struct GaussianEncoder {
    pub trunk: Mlp,
    pub mu_head: Mlp,
    pub logvar_head: Mlp,
}

impl GaussianEncoder {
    pub fn init<R: Rng>(
        input: usize,
        hidden_widths: &[usize],
        d: usize,
        hidden: Activation,
        rng: &mut R,
    ) -> Result<Self> {
        if hidden_widths.is_empty() {
            return Err(ModelError::InvalidSpec(
                "gaussian encoder needs at least one hidden layer".into(),
            ));
        }
        let trunk_out = *hidden_widths.last().unwrap();
        let trunk = Mlp::init(
            MlpSpec::chain(
                input,
                &hidden_widths[..hidden_widths.len() - 1],
                trunk_out,
                hidden,
                hidden,
            ),
            rng,
        )?;
        let mu_head = Mlp::init(
            MlpSpec::chain(trunk_out, &[], d, hidden, Activation::Identity),
            rng,
        )?;
        let logvar_head = Mlp::init(
            MlpSpec::chain(trunk_out, &[], d, hidden, Activation::Identity),
            rng,
        )?;
        Ok(Self {
            trunk,
            mu_head,
            logvar_head,
        })
    }

    pub fn output_dim(&self) -> usize {
        self.mu_head.spec.output_dim()
    }

    pub fn input_dim(&self) -> usize {
        self.trunk.spec.input_dim()
    }

    pub fn params(&self) -> Vec<&Tensor> {
        let mut p = self.trunk.params();
        p.extend(self.mu_head.params());
        p.extend(self.logvar_head.params());
        p
    }

    pub fn params_mut(&mut self) -> Vec<&mut Tensor> {
        let mut p = self.trunk.params_mut();
        p.extend(self.mu_head.params_mut());
        p.extend(self.logvar_head.params_mut());
        p
    }

    pub fn named_params(&self, prefix: &str) -> Vec<(String, &Tensor)> {
        let mut out = self.trunk.named_params(&format!("{prefix}.trunk"));
        out.extend(self.mu_head.named_params(&format!("{prefix}.mu")));
        out.extend(self.logvar_head.named_params(&format!("{prefix}.logvar")));
        out
    }

    pub fn load_named(&mut self, prefix: &str, entries: &[(String, Tensor)]) -> Result<()> {
        self.trunk.load_named(&format!("{prefix}.trunk"), entries)?;
        self.mu_head.load_named(&format!("{prefix}.mu"), entries)?;
        self.logvar_head
            .load_named(&format!("{prefix}.logvar"), entries)
    }

    pub fn mount<'t>(&self, tape: &'t Tape, trainable: Trainable) -> GaussianEncoderVars<'t> {
        GaussianEncoderVars {
            trunk: self.trunk.mount(tape, trainable),
            mu_head: self.mu_head.mount(tape, trainable),
            logvar_head: self.logvar_head.mount(tape, trainable),
        }
    }

    /// Posterior mean for a batch, outside any training graph.
    pub fn posterior_mean(&self, x: &Tensor) -> Result<Tensor> {
        let tape = Tape::new();
        let xv = tape.constant(x.clone());
        let vars = self.mount(&tape, Trainable::No);
        let (mu, _) = vars.forward(xv)?;
        Ok(mu.value())
    }
}

pub struct GaussianEncoderVars<'t> {
    pub trunk: MlpVars<'t>,
    pub mu_head: MlpVars<'t>,
    pub logvar_head: MlpVars<'t>,
}

impl<'t> GaussianEncoderVars<'t> {
    /// Returns `(mu, logvar)` for the batch.
    pub fn forward(&self, x: Var<'t>) -> Result<(Var<'t>, Var<'t>)> {
        let h = self.trunk.forward(x)?;
        Ok((self.mu_head.forward(h)?, self.logvar_head.forward(h)?))
    }

    pub fn all_vars(&self) -> Vec<Var<'t>> {
        let mut v = self.trunk.all_vars();
        v.extend(self.mu_head.all_vars());
        v.extend(self.logvar_head.all_vars());
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn forward_shapes_follow_spec() {
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let spec = MlpSpec::chain(
            5,
            &[8, 8],
            3,
            Activation::leaky_default(),
            Activation::Identity,
        );
        let mlp = Mlp::init(spec, &mut rng).unwrap();
        let x = Tensor::zeros(&[7, 5]);
        let out = mlp.forward_plain(&x).unwrap();
        assert_eq!(out.shape(), &[7, 3]);
    }

    #[test]
    fn zero_width_is_rejected() {
        assert!(MlpSpec::new(
            vec![4, 0, 2],
            Activation::Relu,
            Activation::Identity
        )
        .is_err());
    }

    #[test]
    fn named_params_roundtrip_through_load() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let spec = MlpSpec::chain(3, &[4], 2, Activation::Tanh, Activation::Identity);
        let a = Mlp::init(spec.clone(), &mut rng).unwrap();
        let mut b = Mlp::init(spec, &mut rng).unwrap();
        let named: Vec<(String, Tensor)> = a
            .named_params("m")
            .into_iter()
            .map(|(n, t)| (n, t.clone()))
            .collect();
        b.load_named("m", &named).unwrap();
        let x = Tensor::from_vec(vec![2, 3], vec![0.1, -0.2, 0.3, 0.4, -0.5, 0.6]);
        assert_eq!(
            a.forward_plain(&x).unwrap(),
            b.forward_plain(&x).unwrap()
        );
    }
}
