//! Probabilistic CCA: z ∼ N(0, I_d), x|z ∼ N(W_x z + μ_x, Ψ_x),
//! y|z ∼ N(W_y z + μ_y, Ψ_y) with diagonal noise covariances, estimated by
//! EM on the stacked view [x; y]. The log-likelihood trace is nondecreasing;
//! evaluation embeddings are the per-view posterior means E[z|x], E[z|y].

use ccalign_tensor::Tensor;
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{ModelError, Result};

/// Diagonal entries are kept above this floor to stay positive definite.
const PSI_FLOOR: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct PccaParams {
    /// Loading for X, `d_x × d`.
    pub w_x: Tensor,
    /// Loading for Y, `d_y × d`.
    pub w_y: Tensor,
    pub mu_x: Vec<f64>,
    pub mu_y: Vec<f64>,
    /// Diagonal of Ψ_x.
    pub psi_x: Vec<f64>,
    /// Diagonal of Ψ_y.
    pub psi_y: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct PccaFit {
    pub params: PccaParams,
    /// Log-likelihood after each EM iteration.
    pub loglik_trace: Vec<f64>,
}

impl PccaParams {
    pub fn latent_dim(&self) -> usize {
        self.w_x.cols()
    }

    /// Posterior mean E[z|x] per row.
    pub fn posterior_mean_x(&self, x: &Tensor) -> Result<Tensor> {
        posterior_mean(x, &self.w_x, &self.mu_x, &self.psi_x)
    }

    /// Posterior mean E[z|y] per row.
    pub fn posterior_mean_y(&self, y: &Tensor) -> Result<Tensor> {
        posterior_mean(y, &self.w_y, &self.mu_y, &self.psi_y)
    }

    /// Draw paired observations from the generative model.
    pub fn sample<R: Rng>(&self, n: usize, rng: &mut R) -> (Tensor, Tensor) {
        let d = self.latent_dim();
        let (dx, dy) = (self.w_x.rows(), self.w_y.rows());
        let mut xs = vec![0.0; n * dx];
        let mut ys = vec![0.0; n * dy];
        for i in 0..n {
            let z: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
            for j in 0..dx {
                let mut v = self.mu_x[j];
                for (k, zk) in z.iter().enumerate() {
                    v += self.w_x.row(j)[k] * zk;
                }
                let noise: f64 = StandardNormal.sample(rng);
                xs[i * dx + j] = v + noise * self.psi_x[j].sqrt();
            }
            for j in 0..dy {
                let mut v = self.mu_y[j];
                for (k, zk) in z.iter().enumerate() {
                    v += self.w_y.row(j)[k] * zk;
                }
                let noise: f64 = StandardNormal.sample(rng);
                ys[i * dy + j] = v + noise * self.psi_y[j].sqrt();
            }
        }
        (
            Tensor::from_vec(vec![n, dx], xs),
            Tensor::from_vec(vec![n, dy], ys),
        )
    }
}

fn posterior_mean(v: &Tensor, w: &Tensor, mu: &[f64], psi: &[f64]) -> Result<Tensor> {
    let (p, d) = (w.rows(), w.cols());
    if v.cols() != p {
        return Err(ModelError::DimMismatch {
            what: "posterior_mean input",
            expected: p,
            got: v.cols(),
        });
    }
    let wmat = DMatrix::from_fn(p, d, |i, j| w.row(i)[j]);
    let psi_inv_w = DMatrix::from_fn(p, d, |i, j| wmat[(i, j)] / psi[i]);
    let m = DMatrix::identity(d, d) + wmat.transpose() * &psi_inv_w;
    let g = m
        .try_inverse()
        .ok_or(ModelError::NonPdCovariance { iter: 0 })?;
    let proj = psi_inv_w * g.transpose(); // p × d, then E[z|v] = (v−μ)ᵀ · proj
    let n = v.rows();
    let mut out = vec![0.0; n * d];
    for i in 0..n {
        let row = v.row(i);
        for j in 0..d {
            let mut acc = 0.0;
            for k in 0..p {
                acc += (row[k] - mu[k]) * proj[(k, j)];
            }
            out[i * d + j] = acc;
        }
    }
    Ok(Tensor::from_vec(vec![n, d], out))
}

/// EM fit of the joint model. Stops after `iters` iterations or when the
/// log-likelihood gain drops below `tol`.
pub fn pcca_fit_em(
    x: &Tensor,
    y: &Tensor,
    d: usize,
    iters: usize,
    tol: f64,
) -> Result<PccaFit> {
    let n = x.rows();
    assert_eq!(n, y.rows(), "views must have equal row counts");
    let (dx, dy) = (x.cols(), y.cols());
    if d > dx.min(dy) {
        return Err(ModelError::DimMismatch {
            what: "pcca_fit_em d",
            expected: dx.min(dy),
            got: d,
        });
    }
    let p = dx + dy;

    // Stack the views and center.
    let mut mu = vec![0.0; p];
    for i in 0..n {
        for (j, v) in x.row(i).iter().enumerate() {
            mu[j] += v;
        }
        for (j, v) in y.row(i).iter().enumerate() {
            mu[dx + j] += v;
        }
    }
    mu.iter_mut().for_each(|m| *m /= n as f64);
    let c = DMatrix::from_fn(n, p, |i, j| {
        if j < dx {
            x.row(i)[j] - mu[j]
        } else {
            y.row(i)[j - dx] - mu[j]
        }
    });
    let s_diag: Vec<f64> = (0..p)
        .map(|j| c.column(j).iter().map(|v| v * v).sum::<f64>() / n as f64)
        .collect();

    // Deterministic init from the top principal directions.
    let cov = c.transpose() * &c / n as f64;
    let eig = cov.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|a, b| eig.eigenvalues[*b].partial_cmp(&eig.eigenvalues[*a]).unwrap());
    let mut w = DMatrix::zeros(p, d);
    for (k, &idx) in order[..d].iter().enumerate() {
        let scale = eig.eigenvalues[idx].max(PSI_FLOOR).sqrt();
        for i in 0..p {
            w[(i, k)] = eig.eigenvectors[(i, idx)] * scale;
        }
    }
    let mut psi: Vec<f64> = (0..p)
        .map(|j| {
            let loading: f64 = (0..d).map(|k| w[(j, k)] * w[(j, k)]).sum();
            (s_diag[j] - loading).max(0.1 * s_diag[j]).max(PSI_FLOOR)
        })
        .collect();

    let loglik = |w: &DMatrix<f64>, psi: &[f64], iter: usize| -> Result<f64> {
        let b = DMatrix::from_fn(p, d, |i, j| w[(i, j)] / psi[i]);
        let m = DMatrix::identity(d, d) + w.transpose() * &b;
        let m_chol = m
            .clone()
            .cholesky()
            .ok_or(ModelError::NonPdCovariance { iter })?;
        let logdet_m: f64 = m_chol
            .l()
            .diagonal()
            .iter()
            .map(|v| 2.0 * v.ln())
            .sum();
        let logdet = logdet_m + psi.iter().map(|v| v.ln()).sum::<f64>();
        let g = m_chol.inverse();
        let a = &c * &b; // n × d
        let bsb = a.transpose() * &a / n as f64;
        let tr_inv_s: f64 = (0..p).map(|j| s_diag[j] / psi[j]).sum::<f64>()
            - (g * bsb).trace();
        Ok(-0.5 * n as f64 * (p as f64 * (2.0 * std::f64::consts::PI).ln() + logdet + tr_inv_s))
    };

    let mut trace = Vec::with_capacity(iters);
    let mut prev = f64::NEG_INFINITY;
    for iter in 0..iters {
        // E-step.
        let b = DMatrix::from_fn(p, d, |i, j| w[(i, j)] / psi[i]);
        let m = DMatrix::identity(d, d) + w.transpose() * &b;
        let g = m
            .cholesky()
            .ok_or(ModelError::NonPdCovariance { iter })?
            .inverse();
        let ez = &c * &b * &g; // n × d
        let sum_ezz = &g * n as f64 + ez.transpose() * &ez;

        // M-step.
        let ctez = c.transpose() * &ez; // p × d
        let sum_ezz_inv = sum_ezz
            .try_inverse()
            .ok_or(ModelError::NonPdCovariance { iter })?;
        let w_new = &ctez * sum_ezz_inv;
        let psi_new: Vec<f64> = (0..p)
            .map(|j| {
                let coupled: f64 = (0..d).map(|k| w_new[(j, k)] * ctez[(j, k)]).sum();
                (s_diag[j] - coupled / n as f64).max(PSI_FLOOR)
            })
            .collect();
        w = w_new;
        psi = psi_new;

        let ll = loglik(&w, &psi, iter)?;
        trace.push(ll);
        if (ll - prev).abs() < tol {
            break;
        }
        prev = ll;
    }

    let params = PccaParams {
        w_x: Tensor::from_vec(
            vec![dx, d],
            (0..dx).flat_map(|i| (0..d).map(move |j| (i, j)))
                .map(|(i, j)| w[(i, j)])
                .collect(),
        ),
        w_y: Tensor::from_vec(
            vec![dy, d],
            (0..dy)
                .flat_map(|i| (0..d).map(move |j| (i, j)))
                .map(|(i, j)| w[(dx + i, j)])
                .collect(),
        ),
        mu_x: mu[..dx].to_vec(),
        mu_y: mu[dx..].to_vec(),
        psi_x: psi[..dx].to_vec(),
        psi_y: psi[dx..].to_vec(),
    };
    Ok(PccaFit {
        params,
        loglik_trace: trace,
    })
}

/// Principal angles (degrees) between the column spaces of two `p × d` bases.
pub fn principal_angles_deg(a: &Tensor, b: &Tensor) -> Vec<f64> {
    let to_dm = |t: &Tensor| DMatrix::from_fn(t.rows(), t.cols(), |i, j| t.row(i)[j]);
    let qa = orthonormal_basis(to_dm(a));
    let qb = orthonormal_basis(to_dm(b));
    let m = qa.transpose() * qb;
    let svd = m.svd(false, false);
    let mut cosines: Vec<f64> = svd.singular_values.iter().map(|s| s.clamp(0.0, 1.0)).collect();
    cosines.sort_by(|x, y| y.partial_cmp(x).unwrap());
    cosines.iter().map(|c| c.acos().to_degrees()).collect()
}

fn orthonormal_basis(m: DMatrix<f64>) -> DMatrix<f64> {
    let svd = m.svd(true, false);
    let u = svd.u.expect("svd with u");
    let rank = svd
        .singular_values
        .iter()
        .filter(|s| **s > 1e-10)
        .count();
    u.columns(0, rank).into_owned()
}
