use std::cell::RefCell;

use ndarray::linalg::general_mat_mul;
use ndarray::{Array2, ArrayView2};

use crate::error::{Result, TensorError};
use crate::tensor::Tensor;

/// `a · b` into a freshly allocated row-major buffer. `dot` is avoided since
/// its result buffer is not guaranteed to be C-order for transposed operands.
fn matmul_raw(a: &ArrayView2<'_, f64>, b: &ArrayView2<'_, f64>) -> Vec<f64> {
    let mut out = Array2::<f64>::zeros((a.nrows(), b.ncols()));
    general_mat_mul(1.0, a, b, 0.0, &mut out);
    out.into_raw_vec_and_offset().0
}

/// Primitive operations recorded on the tape. Each variant stores the node
/// ids of its inputs; gradients are dispatched over this enum in `backward`.
#[derive(Clone, Debug)]
enum Op {
    Leaf,
    MatMul { a: usize, b: usize },
    Add { a: usize, b: usize },
    AddBias { a: usize, b: usize },
    Sub { a: usize, b: usize },
    Mul { a: usize, b: usize },
    Scale { a: usize, c: f64 },
    AddScalar { a: usize },
    Neg { a: usize },
    Relu { a: usize },
    LeakyRelu { a: usize, slope: f64 },
    Tanh { a: usize },
    Sigmoid { a: usize },
    Log { a: usize },
    Exp { a: usize },
    Square { a: usize },
    Mean { a: usize },
    Sum { a: usize },
    Concat { a: usize, b: usize, axis: usize },
    Slice { a: usize, axis: usize, start: usize, end: usize },
}

struct Node {
    value: Tensor,
    op: Op,
    /// True when this node is a grad-requiring leaf or depends on one.
    needs: bool,
}

/// Append-only record of primitive operations. Creation order is a
/// topological order, so one reverse sweep visits every node exactly once.
#[derive(Default)]
pub struct Tape {
    nodes: RefCell<Vec<Node>>,
}

/// Handle to a value on a [`Tape`].
#[derive(Clone, Copy)]
pub struct Var<'t> {
    tape: &'t Tape,
    id: usize,
}

impl std::fmt::Debug for Var<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Var").field("id", &self.id).finish()
    }
}

/// Gradients keyed by tape node, as produced by [`Tape::backward`].
pub struct Gradients {
    grads: Vec<Option<Tensor>>,
}

impl Gradients {
    /// Gradient for `v`; `None` when `v` is not a grad-requiring leaf.
    pub fn wrt(&self, v: Var<'_>) -> Option<&Tensor> {
        self.grads.get(v.id).and_then(|g| g.as_ref())
    }
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.borrow().is_empty()
    }

    /// Mount a tensor on the tape, honoring its `requires_grad` flag.
    pub fn leaf(&self, t: &Tensor) -> Var<'_> {
        self.push(t.clone(), Op::Leaf, t.wants_grad())
    }

    /// Mount a tensor as a constant (never receives gradient).
    pub fn constant(&self, t: Tensor) -> Var<'_> {
        self.push(t.requires_grad(false), Op::Leaf, false)
    }

    pub fn scalar(&self, v: f64) -> Var<'_> {
        self.constant(Tensor::scalar(v))
    }

    fn push(&self, value: Tensor, op: Op, needs: bool) -> Var<'_> {
        let mut nodes = self.nodes.borrow_mut();
        nodes.push(Node { value, op, needs });
        Var {
            tape: self,
            id: nodes.len() - 1,
        }
    }

    fn check_finite(&self, op: &'static str, data: &[f64]) -> Result<()> {
        if data.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(TensorError::NonFinite { op })
        }
    }

    /// Reverse sweep from a scalar root. Returns a gradient for every
    /// grad-requiring leaf; leaves the root does not depend on get zeros.
    pub fn backward(&self, root: Var<'_>) -> Result<Gradients> {
        assert!(
            std::ptr::eq(root.tape, self),
            "backward called with a root from a different tape"
        );
        let nodes = self.nodes.borrow();
        if !nodes[root.id].value.is_scalar() {
            return Err(TensorError::NonScalarRoot {
                got: nodes[root.id].value.shape().to_vec(),
            });
        }

        let mut adj: Vec<Option<Vec<f64>>> = vec![None; nodes.len()];
        adj[root.id] = Some(vec![1.0]);

        for id in (0..=root.id).rev() {
            let Some(g) = adj[id].take() else { continue };
            let node = &nodes[id];
            if !node.needs {
                continue;
            }
            match node.op {
                Op::Leaf => {
                    adj[id] = Some(g);
                    continue;
                }
                Op::MatMul { a, b } => {
                    let (m, n) = (node.value.rows(), node.value.cols());
                    let k = nodes[a].value.cols();
                    let gv = ArrayView2::from_shape((m, n), &g[..]).unwrap();
                    if nodes[a].needs {
                        let bv =
                            ArrayView2::from_shape((k, n), nodes[b].value.data()).unwrap();
                        let da = matmul_raw(&gv, &bv.t());
                        accumulate(&mut adj, a, da, &nodes);
                    }
                    if nodes[b].needs {
                        let av =
                            ArrayView2::from_shape((m, k), nodes[a].value.data()).unwrap();
                        let db = matmul_raw(&av.t(), &gv);
                        accumulate(&mut adj, b, db, &nodes);
                    }
                }
                Op::Add { a, b } => {
                    if nodes[a].needs {
                        accumulate(&mut adj, a, g.clone(), &nodes);
                    }
                    if nodes[b].needs {
                        accumulate(&mut adj, b, g.clone(), &nodes);
                    }
                }
                Op::AddBias { a, b } => {
                    if nodes[a].needs {
                        accumulate(&mut adj, a, g.clone(), &nodes);
                    }
                    if nodes[b].needs {
                        let n = nodes[b].value.len();
                        let mut db = vec![0.0; n];
                        for (i, gi) in g.iter().enumerate() {
                            db[i % n] += gi;
                        }
                        accumulate(&mut adj, b, db, &nodes);
                    }
                }
                Op::Sub { a, b } => {
                    if nodes[a].needs {
                        accumulate(&mut adj, a, g.clone(), &nodes);
                    }
                    if nodes[b].needs {
                        accumulate(&mut adj, b, g.iter().map(|v| -v).collect(), &nodes);
                    }
                }
                Op::Mul { a, b } => {
                    if nodes[a].needs {
                        let da = g
                            .iter()
                            .zip(nodes[b].value.data())
                            .map(|(gi, bi)| gi * bi)
                            .collect();
                        accumulate(&mut adj, a, da, &nodes);
                    }
                    if nodes[b].needs {
                        let db = g
                            .iter()
                            .zip(nodes[a].value.data())
                            .map(|(gi, ai)| gi * ai)
                            .collect();
                        accumulate(&mut adj, b, db, &nodes);
                    }
                }
                Op::Scale { a, c } => {
                    accumulate(&mut adj, a, g.iter().map(|v| c * v).collect(), &nodes);
                }
                Op::AddScalar { a } | Op::Relu { a } | Op::LeakyRelu { a, .. } => {
                    let da: Vec<f64> = match node.op {
                        Op::AddScalar { .. } => g.clone(),
                        Op::Relu { .. } => g
                            .iter()
                            .zip(nodes[a].value.data())
                            .map(|(gi, xi)| if *xi > 0.0 { *gi } else { 0.0 })
                            .collect(),
                        Op::LeakyRelu { slope, .. } => g
                            .iter()
                            .zip(nodes[a].value.data())
                            .map(|(gi, xi)| if *xi > 0.0 { *gi } else { slope * gi })
                            .collect(),
                        _ => unreachable!(),
                    };
                    accumulate(&mut adj, a, da, &nodes);
                }
                Op::Neg { a } => {
                    accumulate(&mut adj, a, g.iter().map(|v| -v).collect(), &nodes);
                }
                Op::Tanh { a } => {
                    let da = g
                        .iter()
                        .zip(node.value.data())
                        .map(|(gi, yi)| gi * (1.0 - yi * yi))
                        .collect();
                    accumulate(&mut adj, a, da, &nodes);
                }
                Op::Sigmoid { a } => {
                    let da = g
                        .iter()
                        .zip(node.value.data())
                        .map(|(gi, yi)| gi * yi * (1.0 - yi))
                        .collect();
                    accumulate(&mut adj, a, da, &nodes);
                }
                Op::Log { a } => {
                    let da = g
                        .iter()
                        .zip(nodes[a].value.data())
                        .map(|(gi, xi)| gi / xi)
                        .collect();
                    accumulate(&mut adj, a, da, &nodes);
                }
                Op::Exp { a } => {
                    let da = g
                        .iter()
                        .zip(node.value.data())
                        .map(|(gi, yi)| gi * yi)
                        .collect();
                    accumulate(&mut adj, a, da, &nodes);
                }
                Op::Square { a } => {
                    let da = g
                        .iter()
                        .zip(nodes[a].value.data())
                        .map(|(gi, xi)| 2.0 * gi * xi)
                        .collect();
                    accumulate(&mut adj, a, da, &nodes);
                }
                Op::Mean { a } => {
                    let n = nodes[a].value.len() as f64;
                    accumulate(&mut adj, a, vec![g[0] / n; nodes[a].value.len()], &nodes);
                }
                Op::Sum { a } => {
                    accumulate(&mut adj, a, vec![g[0]; nodes[a].value.len()], &nodes);
                }
                Op::Concat { a, b, axis } => {
                    let (ra, ca) = (nodes[a].value.rows(), nodes[a].value.cols());
                    let (rb, cb) = (nodes[b].value.rows(), nodes[b].value.cols());
                    if axis == 0 {
                        if nodes[a].needs {
                            accumulate(&mut adj, a, g[..ra * ca].to_vec(), &nodes);
                        }
                        if nodes[b].needs {
                            accumulate(&mut adj, b, g[ra * ca..].to_vec(), &nodes);
                        }
                    } else {
                        let cols = ca + cb;
                        if nodes[a].needs {
                            let mut da = vec![0.0; ra * ca];
                            for i in 0..ra {
                                da[i * ca..(i + 1) * ca]
                                    .copy_from_slice(&g[i * cols..i * cols + ca]);
                            }
                            accumulate(&mut adj, a, da, &nodes);
                        }
                        if nodes[b].needs {
                            let mut db = vec![0.0; rb * cb];
                            for i in 0..rb {
                                db[i * cb..(i + 1) * cb]
                                    .copy_from_slice(&g[i * cols + ca..(i + 1) * cols]);
                            }
                            accumulate(&mut adj, b, db, &nodes);
                        }
                    }
                }
                Op::Slice {
                    a,
                    axis,
                    start,
                    end,
                } => {
                    let (ra, ca) = (nodes[a].value.rows(), nodes[a].value.cols());
                    let mut da = vec![0.0; ra * ca];
                    if axis == 0 {
                        da[start * ca..end * ca].copy_from_slice(&g);
                    } else {
                        let w = end - start;
                        for i in 0..ra {
                            da[i * ca + start..i * ca + end]
                                .copy_from_slice(&g[i * w..(i + 1) * w]);
                        }
                    }
                    accumulate(&mut adj, a, da, &nodes);
                }
            }
        }

        // Grad-requiring leaves untouched by the sweep get explicit zeros.
        let mut grads: Vec<Option<Tensor>> = vec![None; nodes.len()];
        for (id, node) in nodes.iter().enumerate() {
            if matches!(node.op, Op::Leaf) && node.value.wants_grad() {
                let data = adj[id]
                    .take()
                    .unwrap_or_else(|| vec![0.0; node.value.len()]);
                grads[id] = Some(Tensor::from_vec(node.value.shape().to_vec(), data));
            }
        }
        Ok(Gradients { grads })
    }
}

fn accumulate(adj: &mut [Option<Vec<f64>>], id: usize, contrib: Vec<f64>, nodes: &[Node]) {
    if !nodes[id].needs {
        return;
    }
    match &mut adj[id] {
        Some(acc) => {
            for (a, c) in acc.iter_mut().zip(&contrib) {
                *a += c;
            }
        }
        slot => *slot = Some(contrib),
    }
}

impl<'t> Var<'t> {
    pub fn value(&self) -> Tensor {
        self.tape.nodes.borrow()[self.id].value.clone()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.tape.nodes.borrow()[self.id].value.shape().to_vec()
    }

    pub fn item(&self) -> f64 {
        self.tape.nodes.borrow()[self.id].value.item()
    }

    fn assert_same_tape(&self, rhs: Var<'t>) {
        assert!(
            std::ptr::eq(self.tape, rhs.tape),
            "operands live on different tapes"
        );
    }

    fn unary(
        &self,
        op_name: &'static str,
        f: impl Fn(f64) -> f64,
        mk: impl Fn(usize) -> Op,
    ) -> Result<Var<'t>> {
        let (shape, out, needs) = {
            let nodes = self.tape.nodes.borrow();
            let node = &nodes[self.id];
            let out: Vec<f64> = node.value.data().iter().map(|v| f(*v)).collect();
            (node.value.shape().to_vec(), out, node.needs)
        };
        self.tape.check_finite(op_name, &out)?;
        Ok(self
            .tape
            .push(Tensor::from_vec(shape, out), mk(self.id), needs))
    }

    fn zip(
        &self,
        rhs: Var<'t>,
        op_name: &'static str,
        f: impl Fn(f64, f64) -> f64,
        mk: impl Fn(usize, usize) -> Op,
    ) -> Result<Var<'t>> {
        self.assert_same_tape(rhs);
        let (shape, out, needs) = {
            let nodes = self.tape.nodes.borrow();
            let (a, b) = (&nodes[self.id], &nodes[rhs.id]);
            if a.value.shape() != b.value.shape() {
                return Err(TensorError::ShapeMismatch {
                    op: op_name,
                    lhs: a.value.shape().to_vec(),
                    rhs: b.value.shape().to_vec(),
                });
            }
            let out: Vec<f64> = a
                .value
                .data()
                .iter()
                .zip(b.value.data())
                .map(|(x, y)| f(*x, *y))
                .collect();
            (a.value.shape().to_vec(), out, a.needs || b.needs)
        };
        self.tape.check_finite(op_name, &out)?;
        Ok(self
            .tape
            .push(Tensor::from_vec(shape, out), mk(self.id, rhs.id), needs))
    }

    /// Matrix product of two 2-d tensors.
    pub fn matmul(&self, rhs: Var<'t>) -> Result<Var<'t>> {
        self.assert_same_tape(rhs);
        let (out, shape, needs) = {
            let nodes = self.tape.nodes.borrow();
            let (a, b) = (&nodes[self.id], &nodes[rhs.id]);
            if !a.value.is_matrix() || !b.value.is_matrix() {
                return Err(TensorError::BadShape {
                    op: "matmul",
                    expected: "two 2-d tensors".into(),
                    got: if a.value.is_matrix() {
                        b.value.shape().to_vec()
                    } else {
                        a.value.shape().to_vec()
                    },
                });
            }
            let (m, k) = (a.value.rows(), a.value.cols());
            let (k2, n) = (b.value.rows(), b.value.cols());
            if k != k2 {
                return Err(TensorError::ShapeMismatch {
                    op: "matmul",
                    lhs: a.value.shape().to_vec(),
                    rhs: b.value.shape().to_vec(),
                });
            }
            let av = ArrayView2::from_shape((m, k), a.value.data()).unwrap();
            let bv = ArrayView2::from_shape((k2, n), b.value.data()).unwrap();
            (matmul_raw(&av, &bv), vec![m, n], a.needs || b.needs)
        };
        self.tape.check_finite("matmul", &out)?;
        Ok(self.tape.push(
            Tensor::from_vec(shape, out),
            Op::MatMul {
                a: self.id,
                b: rhs.id,
            },
            needs,
        ))
    }

    pub fn add(&self, rhs: Var<'t>) -> Result<Var<'t>> {
        self.zip(rhs, "add", |x, y| x + y, |a, b| Op::Add { a, b })
    }

    pub fn sub(&self, rhs: Var<'t>) -> Result<Var<'t>> {
        self.zip(rhs, "sub", |x, y| x - y, |a, b| Op::Sub { a, b })
    }

    pub fn mul(&self, rhs: Var<'t>) -> Result<Var<'t>> {
        self.zip(rhs, "mul", |x, y| x * y, |a, b| Op::Mul { a, b })
    }

    /// Broadcast-add a bias vector `[n]` (or `[1,n]`) over the rows of `[m,n]`.
    pub fn add_bias(&self, bias: Var<'t>) -> Result<Var<'t>> {
        self.assert_same_tape(bias);
        let (shape, out, needs) = {
            let nodes = self.tape.nodes.borrow();
            let (a, b) = (&nodes[self.id], &nodes[bias.id]);
            let n = a.value.cols();
            if !a.value.is_matrix() || b.value.len() != n {
                return Err(TensorError::ShapeMismatch {
                    op: "add_bias",
                    lhs: a.value.shape().to_vec(),
                    rhs: b.value.shape().to_vec(),
                });
            }
            let bd = b.value.data();
            let out: Vec<f64> = a
                .value
                .data()
                .iter()
                .enumerate()
                .map(|(i, x)| x + bd[i % n])
                .collect();
            (a.value.shape().to_vec(), out, a.needs || b.needs)
        };
        self.tape.check_finite("add_bias", &out)?;
        Ok(self.tape.push(
            Tensor::from_vec(shape, out),
            Op::AddBias {
                a: self.id,
                b: bias.id,
            },
            needs,
        ))
    }

    pub fn scale(&self, c: f64) -> Result<Var<'t>> {
        self.unary("scale", |x| c * x, |a| Op::Scale { a, c })
    }

    pub fn add_scalar(&self, c: f64) -> Result<Var<'t>> {
        self.unary("add_scalar", |x| x + c, |a| Op::AddScalar { a })
    }

    pub fn neg(&self) -> Result<Var<'t>> {
        self.unary("neg", |x| -x, |a| Op::Neg { a })
    }

    pub fn relu(&self) -> Result<Var<'t>> {
        self.unary("relu", |x| x.max(0.0), |a| Op::Relu { a })
    }

    pub fn leaky_relu(&self, slope: f64) -> Result<Var<'t>> {
        self.unary(
            "leaky_relu",
            |x| if x > 0.0 { x } else { slope * x },
            |a| Op::LeakyRelu { a, slope },
        )
    }

    pub fn tanh(&self) -> Result<Var<'t>> {
        self.unary("tanh", f64::tanh, |a| Op::Tanh { a })
    }

    pub fn sigmoid(&self) -> Result<Var<'t>> {
        self.unary(
            "sigmoid",
            |x| 1.0 / (1.0 + (-x).exp()),
            |a| Op::Sigmoid { a },
        )
    }

    pub fn log(&self) -> Result<Var<'t>> {
        self.unary("log", f64::ln, |a| Op::Log { a })
    }

    pub fn exp(&self) -> Result<Var<'t>> {
        self.unary("exp", f64::exp, |a| Op::Exp { a })
    }

    pub fn square(&self) -> Result<Var<'t>> {
        self.unary("square", |x| x * x, |a| Op::Square { a })
    }

    /// Mean over all elements, yielding a scalar.
    pub fn mean(&self) -> Result<Var<'t>> {
        let (out, needs) = {
            let nodes = self.tape.nodes.borrow();
            let node = &nodes[self.id];
            let n = node.value.len().max(1) as f64;
            (node.value.data().iter().sum::<f64>() / n, node.needs)
        };
        self.tape.check_finite("mean", &[out])?;
        Ok(self
            .tape
            .push(Tensor::scalar(out), Op::Mean { a: self.id }, needs))
    }

    /// Sum over all elements, yielding a scalar.
    pub fn sum(&self) -> Result<Var<'t>> {
        let (out, needs) = {
            let nodes = self.tape.nodes.borrow();
            let node = &nodes[self.id];
            (node.value.data().iter().sum::<f64>(), node.needs)
        };
        self.tape.check_finite("sum", &[out])?;
        Ok(self
            .tape
            .push(Tensor::scalar(out), Op::Sum { a: self.id }, needs))
    }

    /// Concatenate two matrices along `axis` (0 = rows, 1 = columns).
    pub fn concat(&self, rhs: Var<'t>, axis: usize) -> Result<Var<'t>> {
        self.assert_same_tape(rhs);
        let (shape, out, needs) = {
            let nodes = self.tape.nodes.borrow();
            let (a, b) = (&nodes[self.id], &nodes[rhs.id]);
            let (ra, ca) = (a.value.rows(), a.value.cols());
            let (rb, cb) = (b.value.rows(), b.value.cols());
            let ok = match axis {
                0 => ca == cb,
                1 => ra == rb,
                _ => false,
            };
            if !ok || !a.value.is_matrix() || !b.value.is_matrix() {
                return Err(TensorError::ShapeMismatch {
                    op: "concat",
                    lhs: a.value.shape().to_vec(),
                    rhs: b.value.shape().to_vec(),
                });
            }
            if axis == 0 {
                let mut out = a.value.data().to_vec();
                out.extend_from_slice(b.value.data());
                (vec![ra + rb, ca], out, a.needs || b.needs)
            } else {
                let mut out = Vec::with_capacity(ra * (ca + cb));
                for i in 0..ra {
                    out.extend_from_slice(a.value.row(i));
                    out.extend_from_slice(b.value.row(i));
                }
                (vec![ra, ca + cb], out, a.needs || b.needs)
            }
        };
        Ok(self.tape.push(
            Tensor::from_vec(shape, out),
            Op::Concat {
                a: self.id,
                b: rhs.id,
                axis,
            },
            needs,
        ))
    }

    /// Contiguous range `[start, end)` along `axis` of a matrix.
    pub fn slice(&self, axis: usize, start: usize, end: usize) -> Result<Var<'t>> {
        let (shape, out, needs) = {
            let nodes = self.tape.nodes.borrow();
            let node = &nodes[self.id];
            let (r, c) = (node.value.rows(), node.value.cols());
            let extent = if axis == 0 { r } else { c };
            if !node.value.is_matrix() || axis > 1 || start >= end || end > extent {
                return Err(TensorError::BadShape {
                    op: "slice",
                    expected: format!("range [{start}, {end}) within axis {axis}"),
                    got: node.value.shape().to_vec(),
                });
            }
            if axis == 0 {
                (
                    vec![end - start, c],
                    node.value.data()[start * c..end * c].to_vec(),
                    node.needs,
                )
            } else {
                let mut out = Vec::with_capacity(r * (end - start));
                for i in 0..r {
                    out.extend_from_slice(&node.value.row(i)[start..end]);
                }
                (vec![r, end - start], out, node.needs)
            }
        };
        Ok(self.tape.push(
            Tensor::from_vec(shape, out),
            Op::Slice {
                a: self.id,
                axis,
                start,
                end,
            },
            needs,
        ))
    }
}
