//! Dense symmetric eigensolver based on cyclic Jacobi rotations.
//!
//! Off-diagonal pairs are annihilated in fixed row-cyclic order, so the same
//! input always produces bit-identical output. Each sweep costs O(n^3) and
//! convergence is quadratic once the off-diagonal mass is small.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};

/// Sweep budget before giving up.
pub const MAX_SWEEPS: usize = 50;

/// Stop once the off-diagonal Frobenius norm falls below this fraction of ‖M‖.
pub const OFF_DIAGONAL_REL: f64 = 1e-12;

/// Symmetry tolerance on input, relative to the largest entry.
const SYMMETRY_REL: f64 = 1e-10;

/// Eigen-decomposition with ascending eigenvalues and matching unit eigenvector columns.
#[derive(Debug, Clone, Serialize)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    #[serde(skip)]
    pub vectors: DMatrix<f64>,
    pub sweeps: usize,
}

impl SymmetricEigen {
    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// Worst ‖M v − λ v‖ over all pairs.
    pub fn max_residual(&self, m: &DMatrix<f64>) -> f64 {
        (0..self.values.len())
            .map(|k| {
                let v = self.vectors.column(k);
                (m * v - v * self.values[k]).norm()
            })
            .fold(0.0, f64::max)
    }

    /// ‖V Λ Vᵀ − M‖_F.
    pub fn reconstruction_error(&self, m: &DMatrix<f64>) -> f64 {
        let lambda = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.values));
        (&self.vectors * lambda * self.vectors.transpose() - m).norm()
    }

    /// ‖VᵀV − I‖_max.
    pub fn orthonormality_error(&self) -> f64 {
        let n = self.values.len();
        (self.vectors.transpose() * &self.vectors - DMatrix::<f64>::identity(n, n)).amax()
    }
}

/// Eigenvalues and eigenvectors of a real symmetric matrix.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> Result<SymmetricEigen> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: m.ncols(),
        });
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("matrix"));
    }
    let scale = m.amax();
    let mut asym = 0.0f64;
    for i in 0..n {
        for j in 0..i {
            asym = asym.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    if asym > SYMMETRY_REL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NotSymmetric(asym));
    }

    // Row-major working copy of the symmetrized input.
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = 0.5 * (m[(i, j)] + m[(j, i)]);
        }
    }
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = OFF_DIAGONAL_REL * norm;
    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a, n);
        if off <= target {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_norm: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, n, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[x * n + x].total_cmp(&a[y * n + y]));
    let values = order.iter().map(|&k| a[k * n + k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, c| v[i * n + order[c]]);
    Ok(SymmetricEigen {
        values,
        vectors,
        sweeps,
    })
}

/// Eigenvalues only, ascending.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    symmetric_eigen(m).map(|e| e.values)
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j] * a[i * n + j];
            }
        }
    }
    s.sqrt()
}

fn rotate(a: &mut [f64], v: &mut [f64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    if apq == 0.0 {
        return;
    }
    let app = a[p * n + p];
    let aqq = a[q * n + q];
    let tau = (aqq - app) / (2.0 * apq);
    let t = if tau.abs() > 1e150 {
        0.5 / tau
    } else {
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let t = if tau == 0.0 { 1.0 } else { t };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // A <- A J
    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = c * akp - s * akq;
        a[k * n + q] = s * akp + c * akq;
    }
    // A <- Jᵀ A
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = c * apk - s * aqk;
        a[q * n + k] = s * apk + c * aqk;
    }
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;
    // V <- V J
    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = c * vkp - s * vkq;
        v[k * n + q] = s * vkp + c * vkq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_input_sorted() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 1.0, 2.0]));
        let e = symmetric_eigen(&m).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        assert_eq!(e.sweeps, 0);
    }

    #[test]
    fn swap_matrix() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let e = symmetric_eigen(&m).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15);
        assert!((e.values[1] - 1.0).abs() < 1e-15);
        assert!(e.max_residual(&m) < 1e-14);
    }

    #[test]
    fn rejects_asymmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(symmetric_eigen(&m), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn zero_and_empty() {
        assert!(symmetric_eigen(&DMatrix::zeros(3, 3)).unwrap().values.iter().all(|&x| x == 0.0));
        assert!(symmetric_eigen(&DMatrix::zeros(0, 0)).unwrap().values.is_empty());
    }

    #[test]
    fn agrees_with_nalgebra() {
        let m = DMatrix::from_fn(9, 9, |i, j| ((i * 7 + j * 7 + i * j) % 11) as f64 - 5.0);
        let mine = symmetric_eigen(&m).unwrap();
        let mut theirs: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().cloned().collect();
        theirs.sort_by(f64::total_cmp);
        for (a, b) in mine.values.iter().zip(&theirs) {
            assert!((a - b).abs() < 1e-11);
        }
        assert!(mine.reconstruction_error(&m) < 1e-11 * m.norm());
    }
}
