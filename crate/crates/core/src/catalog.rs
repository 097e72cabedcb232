//! Named examples with exact closed-form structure constants.
//!
//! References look like `nil3`, `abelian(4)`, `lauret_curve(0.5)` or
//! `heis(3,4)`, optionally prefixed with `catalog:`. Parameters may also be
//! supplied by name (`t`, `n`, `p`, `q`, `k`).

use nalgebra::DMatrix;

use crate::algebra::MetricLieAlgebra;
use crate::construct;
use crate::error::{Error, Result};

pub const NAMES: &[&str] = &[
    "nil3",
    "abelian(n)",
    "mu11_raw",
    "mu11_diagonalized",
    "lauret_curve(t)",
    "nil3_family(t)",
    "abelian_ex1",
    "abelian_ex2",
    "free2(q)",
    "heis(p,q)",
    "nil3_plus_abelian(k)",
];

/// A parsed catalog reference.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogRef {
    pub name: String,
    pub args: Vec<f64>,
    pub named: Vec<(String, f64)>,
}

impl CatalogRef {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let s = s.strip_prefix("catalog:").unwrap_or(s);
        let (name, args) = match s.find('(') {
            None => (s.to_string(), Vec::new()),
            Some(open) => {
                let close = s
                    .rfind(')')
                    .filter(|&c| c > open && c == s.len() - 1)
                    .ok_or_else(|| Error::Parse(format!("malformed catalog reference `{s}`")))?;
                let inner = &s[open + 1..close];
                let args = inner
                    .split(',')
                    .map(str::trim)
                    .filter(|a| !a.is_empty())
                    .map(|a| {
                        a.parse::<f64>()
                            .map_err(|_| Error::Parse(format!("bad catalog argument `{a}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                (s[..open].trim().to_string(), args)
            }
        };
        if name.is_empty() {
            return Err(Error::Parse("empty catalog name".into()));
        }
        Ok(Self {
            name,
            args,
            named: Vec::new(),
        })
    }

    pub fn with_params(mut self, params: &[(String, f64)]) -> Self {
        self.named.extend(params.iter().cloned());
        self
    }

    fn arg(&self, pos: usize, key: &str) -> Option<f64> {
        self.named
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| *v)
            .or_else(|| self.args.get(pos).copied())
    }

    fn required(&self, pos: usize, key: &str) -> Result<f64> {
        self.arg(pos, key)
            .ok_or_else(|| Error::OutOfRange(format!("`{}` needs parameter `{key}`", self.name)))
    }

    fn count(&self, pos: usize, key: &str) -> Result<usize> {
        let v = self.required(pos, key)?;
        if v < 0.0 || v.fract() != 0.0 || v > 1e6 {
            return Err(Error::OutOfRange(format!("`{key}` must be a non-negative integer, got {v}")));
        }
        Ok(v as usize)
    }
}

/// Resolves `reference` (with optional named parameters) to an algebra.
pub fn resolve(reference: &str, params: &[(String, f64)]) -> Result<MetricLieAlgebra> {
    let r = CatalogRef::parse(reference)?.with_params(params);
    let label = canonical_label(&r);
    let alg = match r.name.as_str() {
        "nil3" => nil3(),
        "abelian" => construct::abelian(r.count(0, "n")?, -1.0)?,
        "mu11_raw" => mu11_raw(),
        "mu11_diagonalized" | "mu11" => mu11_diagonalized(),
        "lauret_curve" => lauret_curve(r.required(0, "t")?)?,
        "nil3_family" => nil3_family(r.required(0, "t")?)?,
        "abelian_ex1" => abelian_ex1(),
        "abelian_ex2" => abelian_ex2(),
        "free2" => construct::free_two_step(r.count(0, "q")?)?,
        "heis" => heis(r.count(0, "p")?, r.count(1, "q")?)?,
        "nil3_plus_abelian" => nil3_plus_abelian(r.count(0, "k")?),
        other => return Err(Error::UnknownCatalog(other.to_string())),
    };
    Ok(alg.with_label(label))
}

fn canonical_label(r: &CatalogRef) -> String {
    let keys: &[&str] = match r.name.as_str() {
        "abelian" => &["n"],
        "lauret_curve" | "nil3_family" => &["t"],
        "free2" => &["q"],
        "heis" => &["p", "q"],
        "nil3_plus_abelian" => &["k"],
        _ => &[],
    };
    let vals: Vec<String> = keys
        .iter()
        .enumerate()
        .filter_map(|(i, k)| r.arg(i, k).map(|v| format!("{v}")))
        .collect();
    if vals.is_empty() {
        r.name.clone()
    } else {
        format!("{}({})", r.name, vals.join(","))
    }
}

/// Heisenberg algebra, `[X1, X2] = X3`.
pub fn nil3() -> MetricLieAlgebra {
    MetricLieAlgebra::from_entries(3, &[(0, 1, 2, 1.0)], "nil3").expect("valid")
}

/// `h_3 ⊕ R^k`.
pub fn nil3_plus_abelian(k: usize) -> MetricLieAlgebra {
    MetricLieAlgebra::from_entries(3 + k, &[(0, 1, 2, 1.0)], format!("nil3_plus_abelian({k})")).expect("valid")
}

/// `μ11` in its original nice basis.
pub fn mu11_raw() -> MetricLieAlgebra {
    MetricLieAlgebra::from_entries(
        6,
        &[
            (0, 1, 3, 1.0),
            (0, 3, 4, 1.0),
            (0, 4, 5, 1.0),
            (1, 2, 5, 1.0),
            (1, 3, 5, 1.0),
        ],
        "mu11_raw",
    )
    .expect("valid")
}

/// `μ11` in the basis where the nilsoliton metric is the standard one.
pub fn mu11_diagonalized() -> MetricLieAlgebra {
    let a = 0.6 * 1.5f64.sqrt();
    MetricLieAlgebra::from_entries(
        6,
        &[
            (0, 1, 2, a),
            (0, 1, 3, 0.3),
            (0, 2, 4, 3.0 / 10f64.sqrt()),
            (0, 4, 5, a),
            (1, 2, 5, 0.3),
            (1, 3, 5, a),
        ],
        "mu11_diagonalized",
    )
    .expect("valid")
}

/// The basis change taking `mu11_raw` to `mu11_diagonalized` under `change_basis`.
///
/// This is the transpose of the matrix as it is usually displayed.
pub fn mu11_basis_change() -> DMatrix<f64> {
    let mut g = DMatrix::zeros(6, 6);
    g[(0, 0)] = 10f64.sqrt() / 3.0;
    g[(1, 1)] = (5.0f64 / 3.0).sqrt();
    g[(2, 3)] = 1.0;
    g[(3, 2)] = (2.0f64 / 3.0).sqrt();
    g[(3, 3)] = 1.0 / 6f64.sqrt();
    g[(4, 4)] = 1.0;
    g[(5, 5)] = (3.0f64 / 5.0).sqrt();
    g
}

/// Lauret's curve of 7-dimensional nilsolitons, `t ∈ (0, 1)`.
pub fn lauret_curve(t: f64) -> Result<MetricLieAlgebra> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::OutOfRange(format!("lauret_curve needs t in (0,1), got {t}")));
    }
    let (a, b) = ((1.0 - t).sqrt(), t.sqrt());
    MetricLieAlgebra::from_entries(
        7,
        &[
            (0, 1, 2, a),
            (0, 2, 3, 1.0),
            (0, 3, 4, b),
            (0, 4, 5, 1.0),
            (0, 5, 6, 1.0),
            (1, 2, 4, 1.0),
            (1, 3, 5, 1.0),
            (1, 4, 6, b),
            (2, 3, 6, a),
        ],
        format!("lauret_curve({t})"),
    )
}

/// Derivation spanning `a` for the nil3 solvsoliton family.
pub fn nil3_family_map(t: f64) -> DMatrix<f64> {
    let s = (1.0 - t * t).sqrt();
    DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![t, s, t + s]))
}

pub fn nil3_family_domain(t: f64) -> bool {
    t.abs() < std::f64::consts::FRAC_1_SQRT_2
}

/// Non-Einstein solvsolitons `nil3 ⋊ R`, `|t| < 1/√2`.
pub fn nil3_family(t: f64) -> Result<MetricLieAlgebra> {
    if !nil3_family_domain(t) {
        return Err(Error::OutOfRange(format!("nil3_family needs |t| < 1/sqrt(2), got {t}")));
    }
    let spec = construct::ExtensionSpec::new(&nil3(), vec![nil3_family_map(t)])?;
    Ok(construct::lauret_extension(&spec)?.with_label(format!("nil3_family({t})")))
}

/// A-matrix of the Einstein example over `R^4` (columns orthonormal).
pub fn abelian_ex1_matrix() -> DMatrix<f64> {
    let (r2, r3, r6) = (2f64.sqrt(), 3f64.sqrt(), 6f64.sqrt());
    DMatrix::from_row_slice(
        4,
        3,
        &[r3, 2.0 * r2, 0.0, r3, -r2, r6, r3, -r2, -r6, r3, 0.0, 0.0],
    ) / 12f64.sqrt()
}

/// A-matrix of the non-Einstein example over `R^4`.
pub fn abelian_ex2_matrix() -> DMatrix<f64> {
    DMatrix::from_row_slice(
        4,
        3,
        &[0., 1., 1., 1., 0., 1., 1., -1., 0., 1., 1., -1.],
    ) / 3f64.sqrt()
}

/// Probe tensor with `⟨R̊h, h⟩ / |h|² = 1204/1203` on `abelian_ex1`.
pub fn abelian_ex1_probe() -> DMatrix<f64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-9.0 / 8.0, -1.0, -1.0, 1.0, 0.0, 1.0, 1.0]))
}

/// Probe tensor with `Q(h) / |h|² = 18/107` on `abelian_ex2`.
pub fn abelian_ex2_probe() -> DMatrix<f64> {
    let mut h = DMatrix::zeros(7, 7);
    for (i, v) in [8.0, -4.0, 8.0, -3.0, 1.0, -3.0, 1.0].into_iter().enumerate() {
        h[(i, i)] = v;
    }
    for (i, j, v) in [(4, 5, 3.0), (5, 6, -4.0)] {
        h[(i, j)] = v;
        h[(j, i)] = v;
    }
    h
}

pub fn abelian_ex1() -> MetricLieAlgebra {
    construct::diagonal_abelian_solvsoliton(&abelian_ex1_matrix())
        .expect("valid")
        .with_label("abelian_ex1")
}

pub fn abelian_ex2() -> MetricLieAlgebra {
    construct::diagonal_abelian_solvsoliton(&abelian_ex2_matrix())
        .expect("valid")
        .with_label("abelian_ex2")
}

/// `h_{p,q}` where `q` must be a multiple of the module dimension (2 for p=1, 4 for p=2,3).
pub fn heis(p: usize, q: usize) -> Result<MetricLieAlgebra> {
    let m = match p {
        1 => 2,
        2 | 3 => 4,
        _ => return Err(Error::Unsupported(format!("built-in J-maps exist only for p in 1..=3, got {p}"))),
    };
    if q == 0 || !q.is_multiple_of(m) {
        return Err(Error::OutOfRange(format!("heis({p},q) needs q a positive multiple of {m}, got {q}")));
    }
    construct::heisenberg_like(p, q / m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::CurvaturePackage;

    #[test]
    fn parse_refs() {
        let r = CatalogRef::parse("catalog:heis(3, 4)").unwrap();
        assert_eq!(r.name, "heis");
        assert_eq!(r.args, vec![3.0, 4.0]);
        assert!(CatalogRef::parse("heis(3").is_err());
        assert!(matches!(resolve("nope", &[]), Err(Error::UnknownCatalog(_))));
        assert!(matches!(resolve("lauret_curve(1.5)", &[]), Err(Error::OutOfRange(_))));
        let g = resolve("lauret_curve", &[("t".into(), 0.5)]).unwrap();
        assert_eq!(g.label(), "lauret_curve(0.5)");
    }

    #[test]
    fn mu11_change_of_basis_matches_printed_constants() {
        let moved = mu11_raw().change_basis(&mu11_basis_change()).unwrap();
        let want = mu11_diagonalized();
        for i in 0..6 {
            for j in 0..6 {
                for k in 0..6 {
                    let d = moved.constants().get(i, j, k) - want.constants().get(i, j, k);
                    assert!(d.abs() < 1e-14, "({i},{j},{k}) off by {d}");
                }
            }
        }
    }

    #[test]
    fn lauret_step_and_ricci() {
        let g = lauret_curve(0.3).unwrap();
        let r = g.structure_report();
        assert_eq!(r.step, Some(6));
        assert_eq!(r.derived_dim(), 5);
        let pkg = CurvaturePackage::compute(&g);
        for (i, want) in [4.0, 3.0, 2.0, 1.0, 0.0, -1.0, -2.0].into_iter().enumerate() {
            assert!((pkg.ric[(i, i)] + 0.5 * want).abs() < 1e-12);
        }
    }

    #[test]
    fn a_matrices_are_orthonormal() {
        for a in [abelian_ex1_matrix(), abelian_ex2_matrix()] {
            assert!((a.transpose() * &a - DMatrix::<f64>::identity(3, 3)).amax() < 1e-15);
        }
    }

    #[test]
    fn every_name_resolves() {
        for r in [
            "nil3", "abelian(3)", "mu11_raw", "mu11_diagonalized", "lauret_curve(0.5)",
            "nil3_family(0)", "abelian_ex1", "abelian_ex2", "free2(3)", "heis(3,4)",
            "nil3_plus_abelian(2)",
        ] {
            resolve(r, &[]).unwrap();
        }
    }
}
