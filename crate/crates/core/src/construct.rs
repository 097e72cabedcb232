//! Builders for algebra families and solvable extensions.

use nalgebra::DMatrix;

use crate::algebra::{DerivationSet, MetricLieAlgebra, StructureConstants};
use crate::curvature::CurvaturePackage;
use crate::error::{Error, Result};
use crate::linalg;
use crate::soliton::{detect_soliton_with, SolitonReport};

/// Abelian `R^n`; `lambda` is the soliton constant the caller intends (recorded in the label).
pub fn abelian(n: usize, lambda: f64) -> Result<MetricLieAlgebra> {
    if n == 0 {
        return Err(Error::OutOfRange("abelian dimension must be positive".into()));
    }
    if !(lambda < 0.0) {
        return Err(Error::OutOfRange(format!("soliton constant must be negative, got {lambda}")));
    }
    Ok(MetricLieAlgebra::abelian(n).with_label(format!("abelian({n}) lambda={lambda}")))
}

/// Skew maps `J_α` on `v` defining a two-step bracket through `⟨J_α u, w⟩ = ⟨Z_α, [u, w]⟩`.
#[derive(Debug, Clone)]
pub struct JMapSet {
    pub q: usize,
    pub maps: Vec<DMatrix<f64>>,
}

impl JMapSet {
    pub fn new(q: usize, maps: Vec<DMatrix<f64>>) -> Result<Self> {
        if maps.is_empty() || q == 0 {
            return Err(Error::InvalidJMaps("need at least one map on a nonzero space".into()));
        }
        for (a, j) in maps.iter().enumerate() {
            if j.nrows() != q || j.ncols() != q {
                return Err(Error::InvalidJMaps(format!("map {} is not {q}x{q}", a + 1)));
            }
            if j.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("J-map"));
            }
            let skew = (j + j.transpose()).amax();
            if skew > 1e-12 * j.amax().max(1.0) {
                return Err(Error::InvalidJMaps(format!("map {} is not skew-symmetric ({skew:.3e})", a + 1)));
            }
        }
        Ok(Self { q, maps })
    }

    pub fn p(&self) -> usize {
        self.maps.len()
    }

    /// Largest entry of `J_α J_β + J_β J_α + 2 δ_αβ id`.
    pub fn clifford_residual(&self) -> f64 {
        let id = DMatrix::<f64>::identity(self.q, self.q);
        let mut worst = 0.0f64;
        for (a, x) in self.maps.iter().enumerate() {
            for (b, y) in self.maps.iter().enumerate() {
                let mut m = x * y + y * x;
                if a == b {
                    m += &id * 2.0;
                }
                worst = worst.max(m.amax());
            }
        }
        worst
    }
}

/// Two-step algebra on `v ⊕ z` with `c_ij^{q+α} = (J_α)_{ji}`.
pub fn two_step_from_jmaps(jm: &JMapSet) -> Result<MetricLieAlgebra> {
    let (p, q) = (jm.p(), jm.q);
    let mut c = StructureConstants::zeros(p + q);
    for (a, j) in jm.maps.iter().enumerate() {
        for i in 0..q {
            for k in (i + 1)..q {
                c.set(i, k, q + a, j[(k, i)]);
            }
        }
    }
    MetricLieAlgebra::new(c, format!("two-step(p={p}, q={q})"))
}

/// Left multiplication by `i`, `j`, `k` on the quaternions in the basis `(1, i, j, k)`.
fn quaternion_units() -> [DMatrix<f64>; 3] {
    [
        DMatrix::from_row_slice(4, 4, &[0., -1., 0., 0., 1., 0., 0., 0., 0., 0., 0., -1., 0., 0., 1., 0.]),
        DMatrix::from_row_slice(4, 4, &[0., 0., -1., 0., 0., 0., 0., 1., 1., 0., 0., 0., 0., -1., 0., 0.]),
        DMatrix::from_row_slice(4, 4, &[0., 0., 0., -1., 0., 0., -1., 0., 0., 1., 0., 0., 1., 0., 0., 0.]),
    ]
}

/// Built-in Clifford J-maps for `p ∈ {1, 2, 3}` acting on `k` copies of the irreducible module.
pub fn clifford_jmaps(p: usize, copies: usize) -> Result<JMapSet> {
    if copies == 0 {
        return Err(Error::OutOfRange("need at least one module copy".into()));
    }
    let base: Vec<DMatrix<f64>> = match p {
        1 => vec![DMatrix::from_row_slice(2, 2, &[0., -1., 1., 0.])],
        2 | 3 => quaternion_units().into_iter().take(p).collect(),
        _ => return Err(Error::Unsupported(format!("built-in J-maps exist only for p in 1..=3, got {p}"))),
    };
    let m = base[0].nrows();
    let q = m * copies;
    let maps = base
        .iter()
        .map(|b| {
            let mut j = DMatrix::zeros(q, q);
            for c in 0..copies {
                j.view_mut((c * m, c * m), (m, m)).copy_from(b);
            }
            j
        })
        .collect();
    JMapSet::new(q, maps)
}

/// Generalized Heisenberg algebra `h_{p,q}` from the built-in J-maps.
pub fn heisenberg_like(p: usize, copies: usize) -> Result<MetricLieAlgebra> {
    let jm = clifford_jmaps(p, copies)?;
    let q = jm.q;
    Ok(two_step_from_jmaps(&jm)?.with_label(format!("heis({p},{q})")))
}

/// Free two-step nilpotent algebra on `q` generators, `[U_i, U_j] = Z_(i,j)` in lexicographic pair order.
pub fn free_two_step(q: usize) -> Result<MetricLieAlgebra> {
    if q < 2 {
        return Err(Error::OutOfRange(format!("free two-step needs q >= 2, got {q}")));
    }
    let p = q * (q - 1) / 2;
    let mut c = StructureConstants::zeros(q + p);
    let mut z = q;
    for i in 0..q {
        for j in (i + 1)..q {
            c.set(i, j, z, 1.0);
            z += 1;
        }
    }
    MetricLieAlgebra::new(c, format!("free2({q})"))
}

/// Each bracket of basis vectors is a multiple of one basis vector, and for
/// fixed `i` and `k` at most one `j` has `c_ij^k ≠ 0`.
pub fn is_nice_basis(alg: &MetricLieAlgebra) -> bool {
    let n = alg.dim();
    let c = alg.constants();
    let eps = 1e-12 * c.max_abs().max(1.0);
    for i in 0..n {
        for j in 0..n {
            if c.bracket_basis(i, j).iter().filter(|v| v.abs() > eps).count() > 1 {
                return false;
            }
        }
        for k in 0..n {
            if (0..n).filter(|&j| c.get(i, j, k).abs() > eps).count() > 1 {
                return false;
            }
        }
    }
    true
}

/// Inputs and predictions for a solvsoliton extension `n ⋊ a` of a nilsoliton.
#[derive(Debug, Clone)]
pub struct ExtensionSpec {
    pub base: MetricLieAlgebra,
    pub report: SolitonReport,
    pub a_maps: DerivationSet,
    /// `⟨A, B⟩ = −(1/λ) tr(AB)`.
    pub gram_a: DMatrix<f64>,
    pub predicted_lambda: f64,
    /// `D_n − ad_H` on `n`, zero on `a`.
    pub predicted_d: DMatrix<f64>,
    /// Whether `D_n` lies in the span of the maps.
    pub predicted_einstein: bool,
}

impl ExtensionSpec {
    pub fn new(base: &MetricLieAlgebra, maps: Vec<DMatrix<f64>>) -> Result<Self> {
        let pkg = CurvaturePackage::compute(base);
        let report = detect_soliton_with(&pkg);
        if !report.is_soliton {
            return Err(Error::NotSoliton(report.defect));
        }
        if !base.structure_report().is_nilpotent {
            return Err(Error::NotNilpotent);
        }
        let a_maps = DerivationSet::new(base, maps)?;
        for (i, s) in a_maps.symmetric.iter().enumerate() {
            if !s {
                return Err(Error::NotSelfAdjoint(i + 1));
            }
        }
        let m = a_maps.len();
        let n = base.dim();
        let lambda = report.lambda;
        let gram_a = DMatrix::from_fn(m, m, |a, b| -(&a_maps.maps[a] * &a_maps.maps[b]).trace() / lambda);

        let mut predicted_d = DMatrix::zeros(n + m, n + m);
        let mut ad_h = DMatrix::zeros(n, n);
        if m > 0 {
            let l = linalg::cholesky_lower(&gram_a)?;
            let lit = l.try_inverse().ok_or(Error::Singular)?.transpose();
            for b in 0..m {
                let ab = (0..m).fold(DMatrix::zeros(n, n), |acc, al| acc + &a_maps.maps[al] * lit[(al, b)]);
                ad_h += &ab * ab.trace();
            }
        }
        predicted_d
            .view_mut((0, 0), (n, n))
            .copy_from(&(&report.d - ad_h));

        // D_n ∈ span(a) by least squares in the Frobenius inner product.
        let predicted_einstein = if m == 0 {
            false
        } else {
            let mut cols = DMatrix::zeros(n * n, m);
            for (a, map) in a_maps.maps.iter().enumerate() {
                for (r, v) in map.iter().enumerate() {
                    cols[(r, a)] = *v;
                }
            }
            let target = nalgebra::DVector::from_iterator(n * n, report.d.iter().copied());
            let basis = linalg::orth_span(&cols, 0.0);
            let proj = &basis * (basis.transpose() * &target);
            (&target - proj).norm() <= 1e-9 * target.norm().max(1.0)
        };

        Ok(Self {
            base: base.clone(),
            predicted_lambda: lambda,
            report,
            a_maps,
            gram_a,
            predicted_d,
            predicted_einstein,
        })
    }
}

/// Semidirect solvsoliton `n ⋊ a` with the trace-form metric on `a`.
pub fn lauret_extension(spec: &ExtensionSpec) -> Result<MetricLieAlgebra> {
    let s = spec.base.semidirect_product(&spec.a_maps, &spec.gram_a)?;
    Ok(s.with_label(format!("{} ⋊ a(dim {})", spec.base.label(), spec.a_maps.len())))
}

/// Einstein extension by one unit vector `A` with `ad_A = D / √(tr D)`.
pub fn einstein_rank_one_extension(base: &MetricLieAlgebra) -> Result<MetricLieAlgebra> {
    let report = detect_soliton_with(&CurvaturePackage::compute(base));
    if !report.is_soliton {
        return Err(Error::NotSoliton(report.defect));
    }
    if !(report.trace_d > 0.0) {
        return Err(Error::NonPositiveTrace(report.trace_d));
    }
    let a = &report.d / report.trace_d.sqrt();
    let set = DerivationSet::new(base, vec![a])?;
    let s = base.semidirect_product(&set, &DMatrix::identity(1, 1))?;
    Ok(s.with_label(format!("{} ⋊ R (Einstein)", base.label())))
}

/// `R^n ⋊ a` with `a` spanned by the diagonal maps given by the orthonormal columns of `a`.
pub fn diagonal_abelian_solvsoliton(a: &DMatrix<f64>) -> Result<MetricLieAlgebra> {
    let (n, m) = (a.nrows(), a.ncols());
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("A-matrix"));
    }
    let resid = (a.transpose() * a - DMatrix::<f64>::identity(m, m)).amax();
    if resid > 1e-10 {
        return Err(Error::NotOrthonormal(resid));
    }
    let mut c = StructureConstants::zeros(n + m);
    for al in 0..m {
        for i in 0..n {
            // [A_α, X_i] = a_αi X_i
            c.set(i, n + al, i, -a[(i, al)]);
        }
    }
    MetricLieAlgebra::new(c, format!("diagonal abelian solvsoliton (n={n}, m={m})"))
}

/// Closed-form sectional curvature on a diagonal abelian solvsoliton.
///
/// Coordinates `0..n` are the abelian nilradical, `n..n+m` the `A_α`.
pub fn abelian_sectional_oracle(a: &DMatrix<f64>, u: &[f64], v: &[f64]) -> Result<f64> {
    let (n, m) = (a.nrows(), a.ncols());
    if u.len() != n + m || v.len() != n + m {
        return Err(Error::DimensionMismatch {
            expected: n + m,
            found: u.len(),
        });
    }
    let uu: f64 = u.iter().map(|x| x * x).sum();
    let vv: f64 = v.iter().map(|x| x * x).sum();
    let uv: f64 = u.iter().zip(v).map(|(x, y)| x * y).sum();
    let area = uu * vv - uv * uv;
    if !(area > 1e-14 * uu * vv) {
        return Err(Error::DegeneratePlane);
    }
    let mut r = 0.0;
    for al in 0..m {
        for i in 0..n {
            for j in (i + 1)..n {
                let w = u[i] * v[j] - u[j] * v[i];
                r -= a[(i, al)] * a[(j, al)] * w * w;
            }
        }
    }
    for i in 0..n {
        let cv: f64 = (0..m).map(|al| a[(i, al)] * v[n + al]).sum();
        let cu: f64 = (0..m).map(|al| a[(i, al)] * u[n + al]).sum();
        let d = cv * u[i] - cu * v[i];
        r -= d * d;
    }
    Ok(r / area)
}
