// Thin wrappers over faer for the handful of dense kernels the crate needs.

use alloc::format;
use alloc::vec::Vec;

use faer::{Accum, Mat, MatMut, MatRef, Par, Side};

use crate::error::{Error, Result};

pub(crate) fn par() -> Par {
    faer::get_global_parallelism()
}

pub(crate) fn col_major(values: &[f64], rows: usize, cols: usize) -> MatRef<'_, f64> {
    MatRef::from_column_major_slice(values, rows, cols)
}

pub(crate) fn row_major(values: &[f64], rows: usize, cols: usize) -> MatRef<'_, f64> {
    MatRef::from_row_major_slice(values, rows, cols)
}

pub(crate) fn col_major_mut(values: &mut [f64], rows: usize, cols: usize) -> MatMut<'_, f64> {
    MatMut::from_column_major_slice_mut(values, rows, cols)
}

/// `dst = lhs * rhs`.
pub(crate) fn matmul(dst: MatMut<'_, f64>, lhs: MatRef<'_, f64>, rhs: MatRef<'_, f64>) {
    faer::linalg::matmul::matmul(dst, Accum::Replace, lhs, rhs, 1.0, par());
}

pub(crate) fn mul(lhs: MatRef<'_, f64>, rhs: MatRef<'_, f64>) -> Mat<f64> {
    let mut out = Mat::zeros(lhs.nrows(), rhs.ncols());
    matmul(out.as_mut(), lhs, rhs);
    out
}

/// Column-major copy of a faer matrix (first `cols` columns).
pub(crate) fn leading_columns(a: MatRef<'_, f64>, cols: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.nrows() * cols);
    for j in 0..cols {
        out.extend(a.col(j).iter().copied());
    }
    out
}

pub(crate) struct ThinSvd {
    pub u: Mat<f64>,
    pub s: Vec<f64>,
    pub v: Mat<f64>,
}

/// Thin SVD with singular values in non-increasing order.
pub(crate) fn thin_svd(a: MatRef<'_, f64>) -> Result<ThinSvd> {
    let svd = a.thin_svd().map_err(|e| {
        Error::Numeric(format!(
            "SVD of a {}x{} matrix did not converge ({e:?})",
            a.nrows(),
            a.ncols()
        ))
    })?;
    let s: Vec<f64> = svd.S().column_vector().iter().copied().collect();
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric(format!(
            "SVD of a {}x{} matrix produced non-finite singular values",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(ThinSvd {
        u: svd.U().to_owned(),
        s,
        v: svd.V().to_owned(),
    })
}

/// Orthonormal basis of the column space of `y` (thin Householder Q).
pub(crate) fn orthonormal_basis(y: MatRef<'_, f64>) -> Mat<f64> {
    y.qr().compute_thin_Q()
}

/// Leading `k` eigenpairs of a symmetric matrix, eigenvalues non-increasing.
pub(crate) fn symmetric_top(g: MatRef<'_, f64>, k: usize) -> Result<(Vec<f64>, Mat<f64>)> {
    let n = g.nrows();
    let evd = g
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numeric(format!("eigendecomposition of a {n}x{n} Gram matrix failed ({e:?})")))?;
    let vals = evd.S().column_vector();
    let vecs = evd.U();
    // faer sorts ascending
    let mut values = Vec::with_capacity(k);
    let mut vectors = Mat::zeros(n, k);
    for (out, src) in (0..k).zip((0..n).rev()) {
        values.push(vals[src]);
        vectors.col_mut(out).copy_from(vecs.col(src));
    }
    Ok((values, vectors))
}
