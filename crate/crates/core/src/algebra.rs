//! Metric Lie algebras given by structure constants in an orthonormal basis.
//!
//! Documents may carry a non-identity inner product. It is removed at load
//! time by a Cholesky change of basis, so every `MetricLieAlgebra` is an
//! isometric presentation with orthonormal basis `e_1..e_n`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::tol::TOL_STRUCTURE;

/// Dense antisymmetric storage of `c_ij^k`, indexed `[(i * n + j) * n + k]`.
///
/// The only mutator writes `(i,j)` and `(j,i)` together, so antisymmetry
/// cannot be broken.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    n: usize,
    data: Vec<f64>,
}

impl StructureConstants {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.n + j) * self.n + k]
    }

    /// Sets `[e_i, e_j]` component `k` to `v` (and `[e_j, e_i]` to `-v`).
    ///
    /// # Panics
    /// If `i == j` and `v != 0`.
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        assert!(i != j || v == 0.0, "a bracket [e_i, e_i] must vanish");
        let n = self.n;
        self.data[(i * n + j) * n + k] = v;
        self.data[(j * n + i) * n + k] = -v;
    }

    /// `[e_i, e_j]` as a coefficient slice.
    #[inline]
    pub fn bracket_basis(&self, i: usize, j: usize) -> &[f64] {
        let s = (i * self.n + j) * self.n;
        &self.data[s..s + self.n]
    }

    /// `[x, y]` for arbitrary coordinate vectors.
    pub fn bracket(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n];
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let w = x[i] * y[j];
                if w == 0.0 || i == j {
                    continue;
                }
                for (o, c) in out.iter_mut().zip(self.bracket_basis(i, j)) {
                    *o += w * c;
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Σ over i<j and k of c_ij^k squared.
    pub fn norm_sq_upper(&self) -> f64 {
        let n = self.n;
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += self.bracket_basis(i, j).iter().map(|c| c * c).sum::<f64>();
            }
        }
        s
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }
}

/// Worst Jacobi-identity violation over basis triples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JacobiDefect {
    pub value: f64,
    /// 0-based indices of the worst triple.
    pub triple: (usize, usize, usize),
}

/// Jacobi defect of raw constants: max over i<j<k of the cyclic double-bracket sum.
pub fn jacobi_defect_of(c: &StructureConstants) -> JacobiDefect {
    let n = c.dim();
    let mut worst = JacobiDefect {
        value: 0.0,
        triple: (0, 1.min(n.saturating_sub(1)), 2.min(n.saturating_sub(1))),
    };
    let mut cyc = vec![0.0; n];
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                cyc.iter_mut().for_each(|v| *v = 0.0);
                for (a, b, d) in [(i, j, k), (j, k, i), (k, i, j)] {
                    // [[e_a, e_b], e_d] = Σ_r c_ab^r [e_r, e_d]
                    for r in 0..n {
                        let w = c.get(a, b, r);
                        if w == 0.0 {
                            continue;
                        }
                        for (o, v) in cyc.iter_mut().zip(c.bracket_basis(r, d)) {
                            *o += w * v;
                        }
                    }
                }
                let norm = cyc.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm > worst.value {
                    worst = JacobiDefect {
                        value: norm,
                        triple: (i, j, k),
                    };
                }
            }
        }
    }
    worst
}

/// Jacobi acceptance threshold; the defect is quadratic in the constants.
pub fn jacobi_tolerance(c: &StructureConstants) -> f64 {
    let m = c.max_abs();
    TOL_STRUCTURE * (m * m).max(1.0)
}

/// Lie algebra with a fixed orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricLieAlgebra {
    c: StructureConstants,
    label: String,
}

impl MetricLieAlgebra {
    /// Validates finiteness and the Jacobi identity.
    pub fn new(c: StructureConstants, label: impl Into<String>) -> Result<Self> {
        if c.data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("structure constants"));
        }
        let jd = jacobi_defect_of(&c);
        if jd.value > jacobi_tolerance(&c) {
            return Err(Error::Jacobi {
                defect: jd.value,
                triple: jd.triple,
            });
        }
        Ok(Self {
            c,
            label: label.into(),
        })
    }

    /// Builds from `(i, j, k, value)` entries with 0-based indices.
    pub fn from_entries(
        n: usize,
        entries: &[(usize, usize, usize, f64)],
        label: impl Into<String>,
    ) -> Result<Self> {
        let mut c = StructureConstants::zeros(n);
        for &(i, j, k, v) in entries {
            for idx in [i, j, k] {
                if idx >= n {
                    return Err(Error::IndexOutOfRange {
                        index: idx + 1,
                        dim: n,
                    });
                }
            }
            if i >= j {
                return Err(Error::BracketOrder { i: i + 1, j: j + 1 });
            }
            c.set(i, j, k, v);
        }
        Self::new(c, label)
    }

    pub fn abelian(n: usize) -> Self {
        Self {
            c: StructureConstants::zeros(n),
            label: format!("abelian({n})"),
        }
    }

    pub fn dim(&self) -> usize {
        self.c.dim()
    }

    pub fn constants(&self) -> &StructureConstants {
        &self.c
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn is_abelian(&self) -> bool {
        self.c.is_zero()
    }

    pub fn jacobi_defect(&self) -> JacobiDefect {
        jacobi_defect_of(&self.c)
    }

    pub fn bracket(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        self.c.bracket(x, y)
    }

    /// Matrix of `ad_x`, so column `j` holds `[x, e_j]`.
    pub fn ad(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                for k in 0..n {
                    m[(k, j)] += x[i] * self.c.get(i, j, k);
                }
            }
        }
        m
    }

    pub fn ad_basis(&self, i: usize) -> DMatrix<f64> {
        let mut x = vec![0.0; self.dim()];
        x[i] = 1.0;
        self.ad(&x)
    }

    /// Metric adjoint of `ad_x`; a transpose since the basis is orthonormal.
    pub fn ad_star(&self, x: &[f64]) -> DMatrix<f64> {
        self.ad(x).transpose()
    }

    /// The linear map `M ↦ (M[e_i,e_j] − [Me_i,e_j] − [e_i,Me_j])_{i<j}`, flattened.
    pub fn derivation_defect_vector(&self, m: &DMatrix<f64>) -> Vec<f64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2 * n);
        for i in 0..n {
            for j in (i + 1)..n {
                let cij = self.c.bracket_basis(i, j);
                for k in 0..n {
                    let mut v = 0.0;
                    for r in 0..n {
                        v += m[(k, r)] * cij[r];
                        v -= m[(r, i)] * self.c.get(r, j, k);
                        v -= m[(r, j)] * self.c.get(i, r, k);
                    }
                    out.push(v);
                }
            }
        }
        out
    }

    /// Largest per-pair Euclidean norm of the derivation defect.
    pub fn derivation_defect(&self, m: &DMatrix<f64>) -> f64 {
        let n = self.dim();
        if n < 2 {
            return 0.0;
        }
        self.derivation_defect_vector(m)
            .chunks(n)
            .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// Frobenius-orthonormal basis of Der(g).
    pub fn derivation_space(&self) -> Vec<DMatrix<f64>> {
        let n = self.dim();
        let rows = n * n.saturating_sub(1) / 2 * n;
        let mut l = DMatrix::zeros(rows, n * n);
        for r in 0..n {
            for s in 0..n {
                let mut e = DMatrix::zeros(n, n);
                e[(r, s)] = 1.0;
                let col = self.derivation_defect_vector(&e);
                for (row, v) in col.into_iter().enumerate() {
                    l[(row, r * n + s)] = v;
                }
            }
        }
        let ns = linalg::nullspace(&l);
        (0..ns.ncols())
            .map(|c| DMatrix::from_fn(n, n, |r, s| ns[(r * n + s, c)]))
            .collect()
    }

    /// New constants `G μ(G⁻¹x, G⁻¹y)`; the basis stays orthonormal.
    pub fn change_basis(&self, g: &DMatrix<f64>) -> Result<Self> {
        let n = self.dim();
        if g.nrows() != n || g.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: g.nrows(),
            });
        }
        let cond = linalg::condition_number(g);
        if !cond.is_finite() {
            return Err(Error::Singular);
        }
        let ginv = g.clone().try_inverse().ok_or(Error::Singular)?;
        // t[p][q][k] = Σ_r G_kr c_pq^r
        let mut t = vec![0.0; n * n * n];
        for p in 0..n {
            for q in 0..n {
                let cpq = self.c.bracket_basis(p, q);
                for k in 0..n {
                    t[(p * n + q) * n + k] = (0..n).map(|r| g[(k, r)] * cpq[r]).sum();
                }
            }
        }
        // u[a][q][k] = Σ_p Ginv_pa t[p][q][k]
        let mut u = vec![0.0; n * n * n];
        for a in 0..n {
            for p in 0..n {
                let w = ginv[(p, a)];
                if w == 0.0 {
                    continue;
                }
                for qk in 0..n * n {
                    u[a * n * n + qk] += w * t[p * n * n + qk];
                }
            }
        }
        let mut c = StructureConstants::zeros(n);
        for a in 0..n {
            for b in (a + 1)..n {
                for k in 0..n {
                    let v: f64 = (0..n)
                        .map(|q| ginv[(q, b)] * u[(a * n + q) * n + k])
                        .sum();
                    c.set(a, b, k, v);
                }
            }
        }
        let label = if cond > 1.0 + 1e-12 {
            format!("{} [basis change, cond {:.3e}]", self.label, cond)
        } else {
            self.label.clone()
        };
        Self::new(c, label)
    }

    /// Structure constants multiplied by `s`; curvature scales by `s²`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            c: self.c.scaled(s),
            label: format!("{} [scaled {s}]", self.label),
        }
    }

    /// Mean curvature vector: `Σ_i (tr ad_{e_i}) e_i`.
    pub fn mean_curvature(&self) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.c.get(i, j, j)).sum())
            .collect()
    }

    pub fn is_unimodular(&self) -> bool {
        let tol = TOL_STRUCTURE * self.c.max_abs().max(1.0);
        self.mean_curvature().iter().all(|t| t.abs() <= tol)
    }

    /// Orthonormal basis of `[a, b]` for subspaces given as column bases.
    fn bracket_span(&self, a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.dim();
        let mut cols = DMatrix::zeros(n, a.ncols() * b.ncols());
        let mut idx = 0;
        for x in a.column_iter() {
            let xv: Vec<f64> = x.iter().copied().collect();
            for y in b.column_iter() {
                let yv: Vec<f64> = y.iter().copied().collect();
                let br = self.c.bracket(&xv, &yv);
                for k in 0..n {
                    cols[(k, idx)] = br[k];
                }
                idx += 1;
            }
        }
        linalg::orth_span(&cols, self.c.max_abs())
    }

    pub fn structure_report(&self) -> StructureReport {
        let n = self.dim();
        let full = DMatrix::<f64>::identity(n, n);

        let mut lower = vec![n];
        let mut cur = full.clone();
        while cur.ncols() > 0 && lower.len() <= n + 1 {
            let next = self.bracket_span(&full, &cur);
            if next.ncols() == cur.ncols() {
                break;
            }
            lower.push(next.ncols());
            cur = next;
        }
        let is_nilpotent = *lower.last().unwrap() == 0;

        let derived = self.bracket_span(&full, &full);
        let mut series = vec![n];
        let mut cur = full.clone();
        while cur.ncols() > 0 {
            let next = self.bracket_span(&cur, &cur);
            if next.ncols() == cur.ncols() {
                break;
            }
            series.push(next.ncols());
            cur = next;
        }
        let is_solvable = *series.last().unwrap() == 0;

        StructureReport {
            dim: n,
            is_nilpotent,
            step: if is_nilpotent { Some(lower.len() - 1) } else { None },
            is_solvable,
            is_unimodular: self.is_unimodular(),
            lower_central_dims: lower,
            derived_series_dims: series,
            derived_subalgebra_basis: linalg::to_rows(&derived.transpose()),
        }
    }

    /// Orthonormal split `v ⊕ z` with `z = [g, g]` for a two-step nilpotent algebra.
    pub fn two_step_split(&self) -> Result<TwoStepSplit> {
        let n = self.dim();
        let full = DMatrix::<f64>::identity(n, n);
        let z = self.bracket_span(&full, &full);
        if z.ncols() == 0 {
            return Err(Error::NotTwoStep);
        }
        if self.bracket_span(&full, &z).ncols() != 0 {
            return Err(Error::NotTwoStep);
        }
        let v = linalg::complement(&z, n);
        Ok(TwoStepSplit { v, z })
    }

    /// Semidirect product `self ⋊ a` with `[A, X] = A(X)`, `[A, B] = 0`.
    ///
    /// `gram_a` is the inner product on `a`; the maps are re-expressed in an
    /// orthonormal basis of `a` so the result has identity Gram.
    pub fn semidirect_product(&self, a: &DerivationSet, gram_a: &DMatrix<f64>) -> Result<Self> {
        let n = self.dim();
        let m = a.maps.len();
        if gram_a.nrows() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: gram_a.nrows(),
            });
        }
        for (i, x) in a.maps.iter().enumerate() {
            for (j, y) in a.maps.iter().enumerate().skip(i + 1) {
                let comm = x * y - y * x;
                if comm.amax() > TOL_STRUCTURE * (x.amax() * y.amax()).max(1.0) {
                    return Err(Error::NotCommuting(i + 1, j + 1));
                }
            }
        }
        let maps = if m == 0 {
            Vec::new()
        } else {
            let l = linalg::cholesky_lower(gram_a)?;
            // A'_β = Σ_α A_α (L⁻ᵀ)_αβ is orthonormal.
            let lit = l.try_inverse().ok_or(Error::Singular)?.transpose();
            (0..m)
                .map(|b| {
                    a.maps
                        .iter()
                        .enumerate()
                        .fold(DMatrix::zeros(n, n), |acc, (al, x)| acc + x * lit[(al, b)])
                })
                .collect::<Vec<_>>()
        };
        let mut c = StructureConstants::zeros(n + m);
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    c.set(i, j, k, self.c.get(i, j, k));
                }
            }
        }
        for (b, map) in maps.iter().enumerate() {
            for i in 0..n {
                for k in 0..n {
                    // [e_i, A_b] = −A_b e_i, stored with i < n + b.
                    c.set(i, n + b, k, -map[(k, i)]);
                }
            }
        }
        Self::new(c, format!("{} ⋊ a(dim {m})", self.label))
    }

    /// Serializable document with 1-based indices and identity Gram omitted.
    pub fn to_document(&self) -> AlgebraDocument {
        let n = self.dim();
        let scale = self.c.max_abs();
        let mut brackets = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let coeffs: BTreeMap<String, f64> = self
                    .c
                    .bracket_basis(i, j)
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| v.abs() > 1e-15 * scale)
                    .map(|(k, v)| ((k + 1).to_string(), *v))
                    .collect();
                if !coeffs.is_empty() {
                    brackets.push(BracketEntry {
                        i: i + 1,
                        j: j + 1,
                        coeffs,
                    });
                }
            }
        }
        AlgebraDocument {
            dim: n,
            brackets,
            gram: None,
            label: Some(self.label.clone()),
        }
    }

    pub fn from_document(doc: &AlgebraDocument) -> Result<Self> {
        let n = doc.dim;
        if n == 0 {
            return Err(Error::Parse("dim must be positive".into()));
        }
        let mut c = StructureConstants::zeros(n);
        for b in &doc.brackets {
            for idx in [b.i, b.j] {
                if idx == 0 || idx > n {
                    return Err(Error::IndexOutOfRange { index: idx, dim: n });
                }
            }
            if b.i >= b.j {
                return Err(Error::BracketOrder { i: b.i, j: b.j });
            }
            for (key, &v) in &b.coeffs {
                let k: usize = key
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("coefficient key `{key}` is not an index")))?;
                if k == 0 || k > n {
                    return Err(Error::IndexOutOfRange { index: k, dim: n });
                }
                if !v.is_finite() {
                    return Err(Error::NonFinite("structure constants"));
                }
                let prev = c.get(b.i - 1, b.j - 1, k - 1);
                c.set(b.i - 1, b.j - 1, k - 1, prev + v);
            }
        }
        let label = doc.label.clone().unwrap_or_else(|| format!("algebra(dim {n})"));
        let gram = match &doc.gram {
            None => None,
            Some(g) => Some(g.to_matrix(n)?),
        };
        let Some(gram) = gram else {
            return Self::new(c, label);
        };
        if gram.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("inner product"));
        }
        let l = linalg::cholesky_lower(&gram)?;
        if (&gram - DMatrix::<f64>::identity(n, n)).amax() == 0.0 {
            return Self::new(c, label);
        }
        // Check Jacobi in the given basis first so the reported triple refers to it.
        let raw = Self::new(c, label.clone())?;
        // Coordinates in the orthonormal basis f = e L⁻ᵀ are y = Lᵀ x.
        let out = raw.change_basis(&l.transpose())?;
        Ok(out.with_label(format!("{label} [gram normalized]")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: AlgebraDocument =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_document(&doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("document serializes")
    }
}

/// Lower central and derived series data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureReport {
    pub dim: usize,
    pub is_nilpotent: bool,
    pub step: Option<usize>,
    pub is_solvable: bool,
    pub is_unimodular: bool,
    pub lower_central_dims: Vec<usize>,
    pub derived_series_dims: Vec<usize>,
    /// Orthonormal basis of `[g, g]`, one vector per row.
    pub derived_subalgebra_basis: Vec<Vec<f64>>,
}

impl StructureReport {
    pub fn derived_dim(&self) -> usize {
        self.derived_subalgebra_basis.len()
    }
}

/// Orthonormal bases (columns) of the complement `v` and the derived algebra `z`.
#[derive(Debug, Clone)]
pub struct TwoStepSplit {
    pub v: DMatrix<f64>,
    pub z: DMatrix<f64>,
}

impl TwoStepSplit {
    /// `p = dim z`.
    pub fn p(&self) -> usize {
        self.z.ncols()
    }

    /// `q = dim v`.
    pub fn q(&self) -> usize {
        self.v.ncols()
    }

    /// Orthogonal matrix whose rows are the v-basis followed by the z-basis.
    pub fn adapted_frame(&self) -> DMatrix<f64> {
        let n = self.v.nrows();
        let mut f = DMatrix::zeros(n, n);
        for (r, col) in self.v.column_iter().chain(self.z.column_iter()).enumerate() {
            f.set_row(r, &col.transpose());
        }
        f
    }
}

/// Derivations of a host algebra, validated at construction.
#[derive(Debug, Clone)]
pub struct DerivationSet {
    pub maps: Vec<DMatrix<f64>>,
    pub symmetric: Vec<bool>,
}

impl DerivationSet {
    pub fn new(host: &MetricLieAlgebra, maps: Vec<DMatrix<f64>>) -> Result<Self> {
        let n = host.dim();
        let tol = TOL_STRUCTURE * host.constants().max_abs().max(1.0);
        let mut symmetric = Vec::with_capacity(maps.len());
        for (idx, m) in maps.iter().enumerate() {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: m.nrows(),
                });
            }
            if m.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("derivation"));
            }
            let defect = host.derivation_defect(m);
            if defect > tol * m.amax().max(1.0) {
                return Err(Error::NotDerivation {
                    index: idx + 1,
                    defect,
                });
            }
            symmetric.push((m - m.transpose()).amax() <= 1e-12 * m.amax().max(1.0));
        }
        Ok(Self { maps, symmetric })
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }
}

/// One bracket line of a document: `[e_i, e_j] = Σ coeffs[k] e_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub coeffs: BTreeMap<String, f64>,
}

/// Inner product as a nested or flat row-major array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GramInput {
    Nested(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

impl GramInput {
    pub fn to_matrix(&self, n: usize) -> Result<DMatrix<f64>> {
        match self {
            GramInput::Nested(rows) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(Error::Parse(format!("gram must be {n}x{n}")));
                }
                Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
            }
            GramInput::Flat(v) => {
                if v.len() != n * n {
                    return Err(Error::Parse(format!("gram must have {} entries", n * n)));
                }
                Ok(DMatrix::from_row_slice(n, n, v))
            }
        }
    }
}

/// On-disk algebra format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDocument {
    pub dim: usize,
    #[serde(default)]
    pub brackets: Vec<BracketEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram: Option<GramInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nil3() -> MetricLieAlgebra {
        MetricLieAlgebra::from_entries(3, &[(0, 1, 2, 1.0)], "nil3").unwrap()
    }

    #[test]
    fn broken_jacobi_is_rejected_with_triple() {
        let mut c = StructureConstants::zeros(3);
        c.set(0, 1, 1, 1.0);
        c.set(0, 2, 2, 1.0);
        c.set(1, 2, 0, 1.0);
        let jd = jacobi_defect_of(&c);
        assert!((jd.value - 2.0).abs() < 1e-15);
        assert_eq!(jd.triple, (0, 1, 2));
        assert!(matches!(
            MetricLieAlgebra::new(c, "bad"),
            Err(Error::Jacobi { .. })
        ));
    }

    #[test]
    fn ad_star_on_nil3() {
        let g = nil3();
        let s = g.ad_star(&[1.0, 0.0, 0.0]);
        // ad*_{e1} e3 = e2, ad*_{e1} e2 = 0
        assert_eq!(s.column(2).iter().copied().collect::<Vec<_>>(), vec![0.0, 1.0, 0.0]);
        assert!(s.column(1).amax() == 0.0);
    }

    #[test]
    fn derivation_defects_on_nil3() {
        let g = nil3();
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, 2.0]));
        assert!(g.derivation_defect(&d) < 1e-15);
        let e = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0.0, 0.0]));
        assert!((g.derivation_defect(&e) - 1.0).abs() < 1e-15);
        // L(id) = −μ
        let lid = g.derivation_defect_vector(&DMatrix::identity(3, 3));
        assert_eq!(lid, vec![0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn derivation_space_dims() {
        assert_eq!(nil3().derivation_space().len(), 6);
        assert_eq!(MetricLieAlgebra::abelian(2).derivation_space().len(), 4);
        assert_eq!(MetricLieAlgebra::abelian(3).derivation_space().len(), 9);
    }

    #[test]
    fn basis_swap_flips_sign() {
        let p = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let h = nil3().change_basis(&p).unwrap();
        assert_eq!(h.constants().get(0, 1, 2), -1.0);
    }

    #[test]
    fn structure_of_nil3() {
        let r = nil3().structure_report();
        assert!(r.is_nilpotent && r.is_solvable && r.is_unimodular);
        assert_eq!(r.step, Some(2));
        assert_eq!(r.derived_dim(), 1);
        let a = MetricLieAlgebra::abelian(4).structure_report();
        assert_eq!(a.step, Some(1));
    }

    #[test]
    fn semidirect_with_half_nilsoliton_derivation() {
        let g = nil3();
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.5, 0.5, 1.0]));
        let set = DerivationSet::new(&g, vec![d]).unwrap();
        let s = g.semidirect_product(&set, &DMatrix::identity(1, 1)).unwrap();
        assert_eq!(s.dim(), 4);
        let r = s.structure_report();
        assert!(r.is_solvable && !r.is_nilpotent);
        assert_eq!(r.derived_dim(), 3);
        assert_eq!(s.mean_curvature(), vec![0.0, 0.0, 0.0, 2.0]);
        // [A, e3] = e3
        assert_eq!(s.constants().get(3, 2, 2), 1.0);
    }

    #[test]
    fn non_derivation_rejected() {
        let e = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0.0, 0.0]));
        assert!(matches!(
            DerivationSet::new(&nil3(), vec![e]),
            Err(Error::NotDerivation { .. })
        ));
    }

    #[test]
    fn document_round_trip_and_gram() {
        let text = r#"{"dim":3,"brackets":[{"i":1,"j":2,"coeffs":{"3":1.0}}],"label":"nil3"}"#;
        let g = MetricLieAlgebra::from_json(text).unwrap();
        assert_eq!(g, nil3());
        let back = MetricLieAlgebra::from_json(&g.to_json()).unwrap();
        assert_eq!(back, g);

        // Gram diag(4,1,1): e1 has length 2, so f1 = e1/2 and [f1,e2] = e3/2.
        let text = r#"{"dim":3,"brackets":[{"i":1,"j":2,"coeffs":{"3":1.0}}],"gram":[4,0,0,0,1,0,0,0,1]}"#;
        let h = MetricLieAlgebra::from_json(text).unwrap();
        assert!((h.constants().get(0, 1, 2) - 0.5).abs() < 1e-14);

        let bad = r#"{"dim":2,"brackets":[],"gram":[[1,2],[2,1]]}"#;
        assert!(matches!(
            MetricLieAlgebra::from_json(bad),
            Err(Error::NotPositiveDefinite(_))
        ));
        let order = r#"{"dim":3,"brackets":[{"i":2,"j":1,"coeffs":{"3":1.0}}]}"#;
        assert!(matches!(
            MetricLieAlgebra::from_json(order),
            Err(Error::BracketOrder { .. })
        ));
        let range = r#"{"dim":3,"brackets":[{"i":1,"j":2,"coeffs":{"4":1.0}}]}"#;
        assert!(matches!(
            MetricLieAlgebra::from_json(range),
            Err(Error::IndexOutOfRange { .. })
        ));
    }
}
