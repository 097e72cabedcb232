//! Levi-Civita connection and curvature of a left-invariant metric.
//!
//! Conventions, all in the orthonormal basis of the algebra:
//!
//! * `Γ_ijk = ⟨∇_{e_i} e_j, e_k⟩ = ½(c_ij^k − c_ik^j − c_jk^i)`
//! * `R(T,U,V,W) = ⟨∇_T V, ∇_U W⟩ − ⟨∇_U V, ∇_T W⟩ − ⟨∇_{[T,U]} V, W⟩`
//! * `Ric_ij = Σ_p R_ippj`, so `sec(u,v) = R(u,v,v,u) / |u∧v|²`.
//!
//! With these choices `sec(e1,e2) = −¾` on the Heisenberg algebra and
//! `R̊ g = Ric`; both are unit-tested below.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{MetricLieAlgebra, TwoStepSplit};
use crate::eigen::symmetric_eigen;
use crate::error::{Error, Result};
use crate::par::{self, Execution};

/// Default number of random planes in a sectional scan.
pub const DEFAULT_SAMPLES: usize = 4096;
/// Default RNG seed for sectional scans.
pub const DEFAULT_SEED: u64 = 0x5EED;

/// Christoffel symbols `Γ_ijk`.
#[derive(Debug, Clone)]
pub struct Connection {
    n: usize,
    gamma: Vec<f64>,
}

impl Connection {
    pub fn compute(alg: &MetricLieAlgebra) -> Self {
        let n = alg.dim();
        let c = alg.constants();
        let mut gamma = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    gamma[(i * n + j) * n + k] =
                        0.5 * (c.get(i, j, k) - c.get(i, k, j) - c.get(j, k, i));
                }
            }
        }
        Self { n, gamma }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.gamma[(i * self.n + j) * self.n + k]
    }

    /// `∇_{e_i} e_j` as a coefficient vector.
    pub fn nabla(&self, i: usize, j: usize) -> &[f64] {
        let s = (i * self.n + j) * self.n;
        &self.gamma[s..s + self.n]
    }
}

/// Riemann tensor `R_ijkl = R(e_i, e_j, e_k, e_l)`.
#[derive(Debug, Clone)]
pub struct Riemann {
    n: usize,
    data: Vec<f64>,
}

impl Riemann {
    pub fn compute(alg: &MetricLieAlgebra, conn: &Connection, exec: Execution) -> Self {
        let n = alg.dim();
        let c = alg.constants();
        let n3 = n * n * n;
        let mut data = vec![0.0; n * n3];
        if n == 0 {
            return Self { n, data };
        }
        par::fill_chunks(exec, &mut data, n3, |i, block| {
            for j in 0..n {
                let cij = c.bracket_basis(i, j);
                for k in 0..n {
                    for l in 0..n {
                        let mut v = 0.0;
                        let (gik, gjl) = (conn.nabla(i, k), conn.nabla(j, l));
                        let (gjk, gil) = (conn.nabla(j, k), conn.nabla(i, l));
                        for s in 0..n {
                            v += gik[s] * gjl[s] - gjk[s] * gil[s];
                        }
                        for (r, &cr) in cij.iter().enumerate() {
                            if cr != 0.0 {
                                v -= cr * conn.get(r, k, l);
                            }
                        }
                        block[(j * n + k) * n + l] = v;
                    }
                }
            }
        });
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.n;
        self.data[((i * n + j) * n + k) * n + l]
    }

    /// Multilinear evaluation `R(t, u, v, w)`.
    pub fn eval(&self, t: &[f64], u: &[f64], v: &[f64], w: &[f64]) -> f64 {
        let n = self.n;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                let a = t[i] * u[j];
                if a == 0.0 {
                    continue;
                }
                for k in 0..n {
                    let b = a * v[k];
                    if b == 0.0 {
                        continue;
                    }
                    for l in 0..n {
                        s += b * w[l] * self.get(i, j, k, l);
                    }
                }
            }
        }
        s
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest violation of `R_ijkl = −R_jikl = −R_ijlk = R_klij`.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let r = self.get(i, j, k, l);
                        worst = worst
                            .max((r + self.get(j, i, k, l)).abs())
                            .max((r + self.get(i, j, l, k)).abs())
                            .max((r - self.get(k, l, i, j)).abs());
                    }
                }
            }
        }
        worst
    }

    /// Largest violation of the first Bianchi identity.
    pub fn bianchi_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let s = self.get(i, j, k, l) + self.get(j, k, i, l) + self.get(k, i, j, l);
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }
}

/// Connection, curvature tensors and scalar curvature of one algebra.
#[derive(Debug, Clone)]
pub struct CurvaturePackage {
    algebra: MetricLieAlgebra,
    pub connection: Connection,
    pub riemann: Riemann,
    pub ric: DMatrix<f64>,
    pub scal: f64,
}

impl CurvaturePackage {
    pub fn compute(alg: &MetricLieAlgebra) -> Self {
        Self::compute_with(alg, Execution::default())
    }

    pub fn compute_with(alg: &MetricLieAlgebra, exec: Execution) -> Self {
        let n = alg.dim();
        let connection = Connection::compute(alg);
        let riemann = Riemann::compute(alg, &connection, exec);
        let mut ric = DMatrix::from_fn(n, n, |i, j| (0..n).map(|p| riemann.get(i, p, p, j)).sum());
        ric = (&ric + ric.transpose()) * 0.5;
        let scal = ric.trace();
        Self {
            algebra: alg.clone(),
            connection,
            riemann,
            ric,
            scal,
        }
    }

    pub fn algebra(&self) -> &MetricLieAlgebra {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// Sectional curvature of the plane spanned by `u` and `v`.
    pub fn sectional(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        let uu: f64 = u.iter().map(|x| x * x).sum();
        let vv: f64 = v.iter().map(|x| x * x).sum();
        let uv: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
        let area = uu * vv - uv * uv;
        if !(area > 1e-14 * uu * vv) {
            return Err(Error::DegeneratePlane);
        }
        Ok(self.riemann.eval(u, v, v, u) / area)
    }

    /// Curvature operator on Λ² in the basis `e_i ∧ e_j` (i<j): entries `R_ijlk`.
    ///
    /// Its Rayleigh quotient at a decomposable `u ∧ v` is `sec(u, v)`.
    pub fn curvature_operator(&self) -> DMatrix<f64> {
        let pairs = pairs(self.dim());
        let m = pairs.len();
        let mut out = DMatrix::from_fn(m, m, |a, b| {
            let (i, j) = pairs[a];
            let (k, l) = pairs[b];
            self.riemann.get(i, j, l, k)
        });
        out = (&out + out.transpose()) * 0.5;
        out
    }
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect()
}

/// Sectional curvature of a coordinate plane (1-based indices).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlaneValue {
    pub i: usize,
    pub j: usize,
    pub sec: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SectionalScan {
    pub coordinate_plane_values: Vec<PlaneValue>,
    pub samples: usize,
    pub seed: u64,
    /// Extremes over coordinate planes and random planes.
    pub sampled_min: f64,
    pub sampled_max: f64,
    /// Extreme eigenvalues of the Λ² curvature operator; the max bounds every sectional value.
    pub lambda2_min: f64,
    pub lambda2_max: f64,
}

impl SectionalScan {
    /// Whether a plane with curvature above `tol` was found.
    pub fn has_positive(&self, tol: f64) -> bool {
        self.sampled_max > tol
    }

    pub fn has_negative(&self, tol: f64) -> bool {
        self.sampled_min < -tol
    }
}

/// Coordinate planes plus `samples` random planes, reproducible from `seed`.
pub fn sectional_scan(pkg: &CurvaturePackage, samples: usize, seed: u64, exec: Execution) -> Result<SectionalScan> {
    let n = pkg.dim();
    let lam = pkg.curvature_operator();
    let idx = pairs(n);
    let coordinate: Vec<PlaneValue> = idx
        .iter()
        .enumerate()
        .map(|(a, &(i, j))| PlaneValue {
            i: i + 1,
            j: j + 1,
            sec: lam[(a, a)],
        })
        .collect();
    let (lambda2_min, lambda2_max) = if idx.is_empty() {
        (0.0, 0.0)
    } else {
        let e = symmetric_eigen(&lam)?;
        (e.min(), e.max())
    };

    let sampled: Vec<f64> = if idx.is_empty() {
        Vec::new()
    } else {
        par::map_range(exec, samples, |s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s as u64);
            loop {
                let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let w: Vec<f64> = idx.iter().map(|&(i, j)| u[i] * v[j] - u[j] * v[i]).collect();
                let ww: f64 = w.iter().map(|x| x * x).sum();
                if ww < 1e-8 {
                    continue;
                }
                let wv = &lam * nalgebra::DVector::from_column_slice(&w);
                let num: f64 = w.iter().zip(wv.iter()).map(|(a, b)| a * b).sum();
                return num / ww;
            }
        })
    };

    let all = coordinate.iter().map(|p| p.sec).chain(sampled.iter().copied());
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in all {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        lo = 0.0;
        hi = 0.0;
    }
    Ok(SectionalScan {
        coordinate_plane_values: coordinate,
        samples,
        seed,
        sampled_min: lo,
        sampled_max: hi,
        lambda2_min,
        lambda2_max,
    })
}

/// Ricci tensor of a two-step nilpotent algebra from structure-constant sums alone.
///
/// In an orthonormal basis adapted to `v ⊕ z`:
/// `Ric_ij = ½ Σ c_ik^α c_kj^α` on `v`, `Ric_αβ = ¼ Σ c_ij^α c_ij^β` on `z`, zero mixed block.
pub fn ricci_two_step_oracle(alg: &MetricLieAlgebra, split: &TwoStepSplit) -> Result<DMatrix<f64>> {
    let n = alg.dim();
    if split.p() + split.q() != n || split.p() == 0 {
        return Err(Error::NotTwoStep);
    }
    let frame = split.adapted_frame();
    let adapted = alg.change_basis(&frame)?;
    let c = adapted.constants();
    let q = split.q();
    let mut r = DMatrix::zeros(n, n);
    for i in 0..q {
        for j in 0..q {
            let mut s = 0.0;
            for k in 0..q {
                for a in q..n {
                    s += c.get(i, k, a) * c.get(k, j, a);
                }
            }
            r[(i, j)] = 0.5 * s;
        }
    }
    for a in q..n {
        for b in q..n {
            let mut s = 0.0;
            for i in 0..q {
                for j in 0..q {
                    s += c.get(i, j, a) * c.get(i, j, b);
                }
            }
            r[(a, b)] = 0.25 * s;
        }
    }
    Ok(frame.transpose() * r * frame)
}

/// Moment-map data of a nilpotent bracket.
#[derive(Debug, Clone)]
pub struct MomentMapRicci {
    pub ric_mm: DMatrix<f64>,
    pub scal_mm: f64,
}

/// Ricci tensor as `¼ m(μ)`, where `⟨m(μ), X⟩ = ⟨π(X)μ, μ⟩` and `|μ|² = 2 Σ_{i<j,k} c²`.
///
/// For `X = E_rs` this reduces to `Σ_ab c_ab^r c_ab^s − 2 Σ_bk c_rb^k c_sb^k`.
pub fn ricci_moment_map_oracle(alg: &MetricLieAlgebra) -> Result<MomentMapRicci> {
    if !alg.structure_report().is_nilpotent {
        return Err(Error::NotNilpotent);
    }
    let n = alg.dim();
    let c = alg.constants();
    let mut m = DMatrix::zeros(n, n);
    for r in 0..n {
        for s in 0..n {
            let mut v = 0.0;
            for a in 0..n {
                for b in 0..n {
                    v += c.get(a, b, r) * c.get(a, b, s);
                }
            }
            for b in 0..n {
                for k in 0..n {
                    v -= 2.0 * c.get(r, b, k) * c.get(s, b, k);
                }
            }
            m[(r, s)] = v;
        }
    }
    let mu_sq = 2.0 * c.norm_sq_upper();
    Ok(MomentMapRicci {
        ric_mm: m * 0.25,
        scal_mm: -0.25 * mu_sq,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nil3() -> MetricLieAlgebra {
        MetricLieAlgebra::from_entries(3, &[(0, 1, 2, 1.0)], "nil3").unwrap()
    }

    fn e(n: usize, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v
    }

    #[test]
    fn nil3_connection_values() {
        let c = Connection::compute(&nil3());
        assert_eq!(c.nabla(0, 1), &[0.0, 0.0, 0.5]);
        assert_eq!(c.nabla(0, 2), &[0.0, -0.5, 0.0]);
        assert_eq!(c.nabla(1, 2), &[0.5, 0.0, 0.0]);
    }

    #[test]
    fn nil3_sign_conventions() {
        let pkg = CurvaturePackage::compute(&nil3());
        assert!((pkg.riemann.get(0, 1, 1, 0) + 0.75).abs() < 1e-15);
        assert!((pkg.sectional(&e(3, 0), &e(3, 1)).unwrap() + 0.75).abs() < 1e-15);
        assert!((pkg.sectional(&e(3, 0), &e(3, 2)).unwrap() - 0.25).abs() < 1e-15);
        let want = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-0.5, -0.5, 0.5]));
        assert!((&pkg.ric - want).amax() < 1e-15);
        assert!((pkg.scal + 0.5).abs() < 1e-15);
    }

    #[test]
    fn connection_is_metric_and_torsion_free() {
        let g = nil3();
        let c = Connection::compute(&g);
        let n = 3;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    // ⟨∇_i e_j, e_k⟩ + ⟨e_j, ∇_i e_k⟩ = 0
                    assert!((c.get(i, j, k) + c.get(i, k, j)).abs() < 1e-15);
                    let torsion = c.get(i, j, k) - c.get(j, i, k) - g.constants().get(i, j, k);
                    assert!(torsion.abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn degenerate_plane() {
        let pkg = CurvaturePackage::compute(&nil3());
        assert!(matches!(
            pkg.sectional(&[1.0, 0.0, 0.0], &[2.0, 0.0, 0.0]),
            Err(Error::DegeneratePlane)
        ));
    }

    #[test]
    fn scan_is_deterministic_and_bounded() {
        let pkg = CurvaturePackage::compute(&nil3());
        let a = sectional_scan(&pkg, 256, DEFAULT_SEED, Execution::Sequential).unwrap();
        let b = sectional_scan(&pkg, 256, DEFAULT_SEED, Execution::Parallel).unwrap();
        assert_eq!(a.sampled_max, b.sampled_max);
        assert_eq!(a.sampled_min, b.sampled_min);
        assert!(a.sampled_max <= a.lambda2_max + 1e-12);
        assert!(a.has_positive(1e-12));
        let secs: Vec<f64> = a.coordinate_plane_values.iter().map(|p| p.sec).collect();
        assert_eq!(secs, vec![-0.75, 0.25, 0.25]);
    }

    #[test]
    fn oracles_on_nil3() {
        let g = nil3();
        let pkg = CurvaturePackage::compute(&g);
        let two = ricci_two_step_oracle(&g, &g.two_step_split().unwrap()).unwrap();
        assert!((&two - &pkg.ric).amax() < 1e-12);
        let mm = ricci_moment_map_oracle(&g).unwrap();
        assert!((&mm.ric_mm - &pkg.ric).amax() < 1e-12);
        assert!((mm.scal_mm + 0.5).abs() < 1e-15);
    }

    #[test]
    fn abelian_is_flat() {
        let pkg = CurvaturePackage::compute(&MetricLieAlgebra::abelian(4));
        assert_eq!(pkg.riemann.norm(), 0.0);
        let scan = sectional_scan(&pkg, 64, 1, Execution::Sequential).unwrap();
        assert_eq!((scan.sampled_min, scan.sampled_max), (0.0, 0.0));
    }
}
