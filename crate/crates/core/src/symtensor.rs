//! Stability operators on symmetric 2-tensors as explicit symmetric matrices.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::curvature::CurvaturePackage;
use crate::eigen::{symmetric_eigen, SymmetricEigen};
use crate::error::{Error, Result};
use crate::linalg;

/// Orthonormal basis of Sym²: `E_ii` then `(E_ij + E_ji)/√2` for i<j, in row order.
#[derive(Debug, Clone, PartialEq)]
pub struct SymBasis {
    n: usize,
    pairs: Vec<(usize, usize)>,
}

impl SymBasis {
    pub fn new(n: usize) -> Self {
        let mut pairs: Vec<(usize, usize)> = (0..n).map(|i| (i, i)).collect();
        for i in 0..n {
            for j in (i + 1)..n {
                pairs.push((i, j));
            }
        }
        Self { n, pairs }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `n(n+1)/2`.
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Nonzero entries of basis element `a` as `(row, col, value)`.
    fn support(&self, a: usize) -> Vec<(usize, usize, f64)> {
        let (i, j) = self.pairs[a];
        if i == j {
            vec![(i, i, 1.0)]
        } else {
            let w = std::f64::consts::FRAC_1_SQRT_2;
            vec![(i, j, w), (j, i, w)]
        }
    }

    pub fn element(&self, a: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (i, j, v) in self.support(a) {
            m[(i, j)] = v;
        }
        m
    }

    /// Coordinates of a symmetric matrix (Frobenius inner products with the basis).
    pub fn coords(&self, h: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.len(),
            self.pairs.iter().map(|&(i, j)| {
                if i == j {
                    h[(i, i)]
                } else {
                    std::f64::consts::SQRT_2 * 0.5 * (h[(i, j)] + h[(j, i)])
                }
            }),
        )
    }

    pub fn from_coords(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (a, &(i, j)) in self.pairs.iter().enumerate() {
            if i == j {
                m[(i, i)] = x[a];
            } else {
                let v = x[a] * std::f64::consts::FRAC_1_SQRT_2;
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }

    /// Matrix of `h ↦ (Σ_kl K(i,j,k,l) h_kl)_ij`, symmetrized.
    fn assemble(&self, kernel: impl Fn(usize, usize, usize, usize) -> f64) -> DMatrix<f64> {
        let supports: Vec<_> = (0..self.len()).map(|a| self.support(a)).collect();
        let big_n = self.len();
        let mut m = DMatrix::zeros(big_n, big_n);
        for a in 0..big_n {
            for b in 0..big_n {
                let mut v = 0.0;
                for &(i, j, wa) in &supports[a] {
                    for &(k, l, wb) in &supports[b] {
                        v += wa * wb * kernel(i, j, k, l);
                    }
                }
                m[(a, b)] = v;
            }
        }
        (&m + m.transpose()) * 0.5
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    /// `R̊`.
    Rho,
    /// `h ↦ ½(Ric h + h Ric)`.
    RicCompose,
    /// `R̊ + Ric∘`.
    Q,
    /// `−2R̊ + 2 Ric∘`.
    Weitzenboeck,
    /// Curvature operator on Λ² (not on Sym²).
    Lambda2,
}

/// Self-adjoint operator stored as a symmetric matrix in its basis.
#[derive(Debug, Clone)]
pub struct SymOperator {
    pub kind: OperatorKind,
    /// Dimension of the underlying algebra.
    pub n: usize,
    pub mat: DMatrix<f64>,
}

impl SymOperator {
    pub fn basis(&self) -> SymBasis {
        SymBasis::new(self.n)
    }

    /// Largest |a_ij − a_ji|.
    pub fn asymmetry(&self) -> f64 {
        (&self.mat - self.mat.transpose()).amax()
    }

    pub fn to_json(&self) -> OperatorJson {
        OperatorJson {
            kind: self.kind,
            n: self.n,
            size: self.mat.nrows(),
            matrix: linalg::to_rows(&self.mat),
        }
    }
}

/// Row-major JSON form of an operator.
#[derive(Debug, Clone, Serialize)]
pub struct OperatorJson {
    pub kind: OperatorKind,
    pub n: usize,
    pub size: usize,
    pub matrix: Vec<Vec<f64>>,
}

/// `(R̊h)_ij = Σ_pq R_ipqj h_pq`.
pub fn rho_operator(pkg: &CurvaturePackage) -> SymOperator {
    let basis = SymBasis::new(pkg.dim());
    let r = &pkg.riemann;
    SymOperator {
        kind: OperatorKind::Rho,
        n: pkg.dim(),
        mat: basis.assemble(|i, j, p, q| r.get(i, p, q, j)),
    }
}

/// `h ↦ ½(Ric h + h Ric)`.
pub fn ric_compose_operator(pkg: &CurvaturePackage) -> SymOperator {
    let basis = SymBasis::new(pkg.dim());
    let ric = &pkg.ric;
    SymOperator {
        kind: OperatorKind::RicCompose,
        n: pkg.dim(),
        mat: basis.assemble(|i, j, k, l| {
            let mut v = 0.0;
            if j == l {
                v += ric[(i, k)];
            }
            if i == k {
                v += ric[(l, j)];
            }
            0.5 * v
        }),
    }
}

pub fn q_operator(pkg: &CurvaturePackage) -> SymOperator {
    let mat = rho_operator(pkg).mat + ric_compose_operator(pkg).mat;
    SymOperator {
        kind: OperatorKind::Q,
        n: pkg.dim(),
        mat,
    }
}

pub fn weitzenboeck_operator(pkg: &CurvaturePackage) -> SymOperator {
    let mat = rho_operator(pkg).mat * -2.0 + ric_compose_operator(pkg).mat * 2.0;
    SymOperator {
        kind: OperatorKind::Weitzenboeck,
        n: pkg.dim(),
        mat,
    }
}

pub fn lambda2_operator(pkg: &CurvaturePackage) -> SymOperator {
    SymOperator {
        kind: OperatorKind::Lambda2,
        n: pkg.dim(),
        mat: pkg.curvature_operator(),
    }
}

/// Ascending spectrum with orthonormal eigenvectors (in basis coordinates).
pub fn sym_spectrum(op: &SymOperator) -> Result<SymmetricEigen> {
    symmetric_eigen(&op.mat)
}

/// `⟨op(h), h⟩` for a symmetric `n×n` matrix `h`.
pub fn evaluate_form(op: &SymOperator, h: &DMatrix<f64>) -> Result<f64> {
    if op.kind == OperatorKind::Lambda2 {
        return Err(Error::Unsupported("evaluate_form needs an operator on Sym²".into()));
    }
    if h.nrows() != op.n || h.ncols() != op.n {
        return Err(Error::DimensionMismatch {
            expected: op.n,
            found: h.nrows(),
        });
    }
    let asym = (h - h.transpose()).amax();
    if asym > 1e-12 * h.amax().max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    let x = op.basis().coords(h);
    Ok(x.dot(&(&op.mat * &x)))
}

/// `⟨h, h⟩` (Frobenius).
pub fn frobenius_sq(h: &DMatrix<f64>) -> f64 {
    h.iter().map(|v| v * v).sum()
}

/// `R̊ h` as a matrix, by direct contraction (independent of the operator matrix).
pub fn rho_apply(pkg: &CurvaturePackage, h: &DMatrix<f64>) -> DMatrix<f64> {
    let n = pkg.dim();
    let r = &pkg.riemann;
    DMatrix::from_fn(n, n, |i, j| {
        let mut s = 0.0;
        for p in 0..n {
            for q in 0..n {
                s += r.get(i, p, q, j) * h[(p, q)];
            }
        }
        s
    })
}
