use nalgebra::{Cholesky, DMatrix, SVD};

use crate::error::{Error, Result};
use crate::tol::TOL_RANK;

/// Orthonormal basis (as columns) for the column span of `a`.
///
/// Singular values below `TOL_RANK * max(sigma_max, scale)` are discarded.
pub(crate) fn orth_span(a: &DMatrix<f64>, scale: f64) -> DMatrix<f64> {
    let rows = a.nrows();
    if a.ncols() == 0 || rows == 0 {
        return DMatrix::zeros(rows, 0);
    }
    let svd = SVD::new(a.clone(), true, false);
    let u = svd.u.expect("u requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = TOL_RANK * smax.max(scale);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > cut && svd.singular_values[i] > 0.0)
        .collect();
    let mut out = DMatrix::zeros(rows, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        out.set_column(c, &u.column(i));
    }
    out
}

/// Orthonormal basis (as columns) for the nullspace of `a`.
pub(crate) fn nullspace(a: &DMatrix<f64>) -> DMatrix<f64> {
    let cols = a.ncols();
    if cols == 0 {
        return DMatrix::zeros(0, 0);
    }
    // Pad with zero rows so the SVD returns a full right factor.
    let rows = a.nrows().max(cols);
    let mut padded = DMatrix::zeros(rows, cols);
    padded.view_mut((0, 0), (a.nrows(), cols)).copy_from(a);
    let svd = SVD::new(padded, false, true);
    let vt = svd.v_t.expect("v_t requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = TOL_RANK * smax.max(f64::MIN_POSITIVE);
    let null: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= cut)
        .collect();
    let mut out = DMatrix::zeros(cols, null.len());
    for (c, &i) in null.iter().enumerate() {
        out.set_column(c, &vt.row(i).transpose());
    }
    out
}

/// Orthonormal complement of the column span of an orthonormal `basis` in R^n.
pub(crate) fn complement(basis: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    if basis.ncols() == 0 {
        return DMatrix::identity(n, n);
    }
    nullspace(&basis.transpose())
}

/// Lower Cholesky factor of a symmetric positive-definite matrix.
pub(crate) fn cholesky_lower(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = g.nrows();
    if g.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: g.ncols(),
        });
    }
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("inner product"));
    }
    let asym = (g - g.transpose()).amax();
    if asym > 1e-12 * g.amax().max(1.0) {
        return Err(Error::NotPositiveDefinite(format!(
            "asymmetry {asym:.3e}"
        )));
    }
    let sym = (g + g.transpose()) * 0.5;
    let chol = Cholesky::new(sym)
        .ok_or_else(|| Error::NotPositiveDefinite("non-positive Cholesky pivot".into()))?;
    let l = chol.l();
    if (0..n).any(|i| l[(i, i)] <= 0.0) {
        return Err(Error::NotPositiveDefinite("non-positive Cholesky pivot".into()));
    }
    Ok(l)
}

/// 2-norm condition number from singular values; infinite when singular.
pub(crate) fn condition_number(g: &DMatrix<f64>) -> f64 {
    let sv = g.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= TOL_RANK * max || min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub(crate) fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}
