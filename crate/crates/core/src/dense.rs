//! Thin singular value decomposition.
//!
//! Backed by faer: nalgebra's bidiagonal SVD was observed to return factors
//! that do not reassemble the input (errors near 1e-3) on some tall, well
//! conditioned matrices, which is unacceptable for certificates.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub(crate) struct ThinSvd {
    pub u: DMatrix<f64>,
    /// Nonincreasing.
    pub sigma: Vec<f64>,
    pub v: DMatrix<f64>,
}

pub(crate) fn thin_svd(a: &DMatrix<f64>) -> Result<ThinSvd> {
    let (rows, cols) = a.shape();
    let m = faer::Mat::<f64>::from_fn(rows, cols, |i, j| a[(i, j)]);
    let svd = m
        .thin_svd()
        .map_err(|e| Error::SolverFailed(format!("singular value decomposition: {e:?}")))?;
    let (u, v) = (svd.U(), svd.V());
    let s = svd.S().column_vector();
    let r = rows.min(cols);
    Ok(ThinSvd {
        u: DMatrix::from_fn(rows, r, |i, j| u[(i, j)]),
        sigma: (0..r).map(|i| s[i]).collect(),
        v: DMatrix::from_fn(cols, r, |i, j| v[(i, j)]),
    })
}

impl ThinSvd {
    /// Minimum-norm least-squares solution of `a x = b`.
    pub fn solve(&self, b: &nalgebra::DVector<f64>) -> nalgebra::DVector<f64> {
        let cutoff = self.sigma.first().copied().unwrap_or(0.0) * f64::EPSILON * self.u.nrows().max(self.v.nrows()) as f64;
        let mut coeffs = self.u.tr_mul(b);
        for (c, &s) in coeffs.iter_mut().zip(&self.sigma) {
            *c = if s > cutoff { *c / s } else { 0.0 };
        }
        &self.v * coeffs
    }
}
