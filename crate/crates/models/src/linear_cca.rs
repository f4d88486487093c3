//! Classic linear CCA via whitened cross-covariance SVD: whiten each view
//! with the inverse square root of its (ridge-regularized) covariance, take
//! the SVD of the whitened cross-covariance, and map the singular vectors
//! back through the whitening transforms.

use ccalign_tensor::Tensor;
use nalgebra::{DMatrix, DVector};

use crate::error::{ModelError, Result};

#[derive(Clone, Debug)]
pub struct LinearCcaResult {
    /// Projection for X, `d_x × d`.
    pub w_x: Tensor,
    /// Projection for Y, `d_y × d`.
    pub w_y: Tensor,
    /// Canonical correlations in [0, 1], nonincreasing.
    pub correlations: Vec<f64>,
    pub mean_x: Vec<f64>,
    pub mean_y: Vec<f64>,
}

impl LinearCcaResult {
    pub fn project_x(&self, x: &Tensor) -> Tensor {
        project(x, &self.mean_x, &self.w_x)
    }

    pub fn project_y(&self, y: &Tensor) -> Tensor {
        project(y, &self.mean_y, &self.w_y)
    }
}

fn project(t: &Tensor, mean: &[f64], w: &Tensor) -> Tensor {
    let (n, p) = (t.rows(), t.cols());
    let d = w.cols();
    let mut out = vec![0.0; n * d];
    for i in 0..n {
        let row = t.row(i);
        for j in 0..d {
            let mut acc = 0.0;
            for k in 0..p {
                acc += (row[k] - mean[k]) * w.row(k)[j];
            }
            out[i * d + j] = acc;
        }
    }
    Tensor::from_vec(vec![n, d], out)
}

fn column_means(t: &Tensor) -> Vec<f64> {
    let (n, p) = (t.rows(), t.cols());
    let mut mean = vec![0.0; p];
    for i in 0..n {
        for (j, v) in t.row(i).iter().enumerate() {
            mean[j] += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    mean
}

fn centered(t: &Tensor, mean: &[f64]) -> DMatrix<f64> {
    let (n, p) = (t.rows(), t.cols());
    DMatrix::from_fn(n, p, |i, j| t.row(i)[j] - mean[j])
}

/// Symmetric inverse square root via eigendecomposition. Fails when the
/// smallest eigenvalue is numerically zero and no ridge was applied.
fn inv_sqrt(mut s: DMatrix<f64>, ridge: f64) -> Result<DMatrix<f64>> {
    let p = s.nrows();
    for i in 0..p {
        s[(i, i)] += ridge;
    }
    let eig = s.symmetric_eigen();
    let max_ev = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
    let floor = max_ev.max(1.0) * 1e-12;
    if eig.eigenvalues.iter().any(|ev| *ev <= floor) {
        return Err(ModelError::SingularCovariance);
    }
    let inv_sqrt_vals = DVector::from_iterator(p, eig.eigenvalues.iter().map(|ev| ev.powf(-0.5)));
    let q = eig.eigenvectors;
    Ok(&q * DMatrix::from_diagonal(&inv_sqrt_vals) * q.transpose())
}

/// Fit linear CCA returning the top `d` canonical directions.
pub fn linear_cca_fit(x: &Tensor, y: &Tensor, d: usize, ridge: f64) -> Result<LinearCcaResult> {
    let n = x.rows();
    assert_eq!(n, y.rows(), "views must have equal row counts");
    let (dx, dy) = (x.cols(), y.cols());
    if d > dx.min(dy) {
        return Err(ModelError::DimMismatch {
            what: "linear_cca_fit d",
            expected: dx.min(dy),
            got: d,
        });
    }
    let mean_x = column_means(x);
    let mean_y = column_means(y);
    let cx = centered(x, &mean_x);
    let cy = centered(y, &mean_y);
    let denom = (n as f64 - 1.0).max(1.0);
    let sxx = cx.transpose() * &cx / denom;
    let syy = cy.transpose() * &cy / denom;
    let sxy = cx.transpose() * &cy / denom;

    let wx_whiten = inv_sqrt(sxx, ridge)?;
    let wy_whiten = inv_sqrt(syy, ridge)?;
    let t = &wx_whiten * sxy * &wy_whiten;

    let svd = t.svd(true, true);
    let u = svd.u.as_ref().expect("svd with u");
    let v_t = svd.v_t.as_ref().expect("svd with v_t");

    // nalgebra does not guarantee ordering; sort by singular value.
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|a, b| {
        svd.singular_values[*b]
            .partial_cmp(&svd.singular_values[*a])
            .unwrap()
    });
    let top = &order[..d];

    let mut w_x = vec![0.0; dx * d];
    let mut w_y = vec![0.0; dy * d];
    let mut correlations = Vec::with_capacity(d);
    for (j, &k) in top.iter().enumerate() {
        correlations.push(svd.singular_values[k].clamp(0.0, 1.0));
        let dir_x = &wx_whiten * u.column(k);
        let dir_y = &wy_whiten * v_t.row(k).transpose();
        for i in 0..dx {
            w_x[i * d + j] = dir_x[i];
        }
        for i in 0..dy {
            w_y[i * d + j] = dir_y[i];
        }
    }

    Ok(LinearCcaResult {
        w_x: Tensor::from_vec(vec![dx, d], w_x),
        w_y: Tensor::from_vec(vec![dy, d], w_y),
        correlations,
        mean_x,
        mean_y,
    })
}
