//! Algebraic Ricci soliton detection and linear stability certificates.

use std::fmt;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::algebra::MetricLieAlgebra;
use crate::curvature::{sectional_scan, CurvaturePackage, SectionalScan, DEFAULT_SAMPLES, DEFAULT_SEED};
use crate::eigen::symmetric_eigen;
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::symtensor::{q_operator, rho_operator, sym_spectrum};
use crate::tol::{Tolerances, TOL_SOLITON_REL};

/// `Ric = λ id + D` with `λ` fitted by least squares over the derivation defect.
#[derive(Debug, Clone, Serialize)]
pub struct SolitonReport {
    pub lambda: f64,
    #[serde(serialize_with = "ser_matrix")]
    pub d: DMatrix<f64>,
    pub defect: f64,
    pub is_soliton: bool,
    pub is_einstein: bool,
    pub trace_d: f64,
}

fn ser_matrix<S: serde::Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.nrows()))?;
    for i in 0..m.nrows() {
        let row: Vec<f64> = (0..m.ncols()).map(|j| m[(i, j)]).collect();
        seq.serialize_element(&row)?;
    }
    seq.end()
}

/// Finds the best soliton constant for the algebra behind `pkg`.
///
/// With `L` the derivation-defect map, `L(id) = −μ`, and
/// `λ* = ⟨L(Ric), L(id)⟩ / |L(id)|²` minimizes `|L(Ric − λ id)|`.
/// Abelian algebras get `λ = −1`, `D = id`.
pub fn detect_soliton_with(pkg: &CurvaturePackage) -> SolitonReport {
    let alg = pkg.algebra();
    let n = alg.dim();
    let id = DMatrix::<f64>::identity(n, n);
    let l_id = alg.derivation_defect_vector(&id);
    let mu_sq: f64 = l_id.iter().map(|v| v * v).sum();
    let lambda = if mu_sq == 0.0 {
        -1.0
    } else {
        let l_ric = alg.derivation_defect_vector(&pkg.ric);
        l_ric.iter().zip(&l_id).map(|(a, b)| a * b).sum::<f64>() / mu_sq
    };
    let d = &pkg.ric - &id * lambda;
    let defect = alg.derivation_defect(&d);
    let ric_norm = pkg.ric.norm();
    let tol = TOL_SOLITON_REL * ric_norm;
    SolitonReport {
        lambda,
        trace_d: d.trace(),
        is_soliton: defect <= tol,
        is_einstein: mu_sq != 0.0 && d.norm() <= tol,
        defect,
        d,
    }
}

pub fn detect_soliton(alg: &MetricLieAlgebra) -> SolitonReport {
    detect_soliton_with(&CurvaturePackage::compute(alg))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Strict,
    Weak,
    Inconclusive,
    NotApplicable,
}

impl Verdict {
    /// Strict if `lhs < rhs − tol`, weak within the band, inconclusive above it.
    pub fn compare(lhs: f64, rhs: f64, tol: &Tolerances) -> Self {
        let band = tol.verdict_band(lhs, rhs);
        if lhs < rhs - band {
            Verdict::Strict
        } else if (lhs - rhs).abs() <= band {
            Verdict::Weak
        } else {
            Verdict::Inconclusive
        }
    }

    fn severity(self) -> u8 {
        match self {
            Verdict::Strict => 0,
            Verdict::Weak => 1,
            Verdict::Inconclusive => 2,
            Verdict::NotApplicable => 3,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Strict => "strict",
            Verdict::Weak => "weak",
            Verdict::Inconclusive => "inconclusive",
            Verdict::NotApplicable => "not_applicable",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Criterion {
    /// max Q vs ½ tr D.
    #[serde(rename = "q")]
    Q,
    /// max R̊ vs −λ.
    #[serde(rename = "einstein")]
    Einstein,
    /// max R̊ vs ¼ tr D.
    #[serde(rename = "rho-quarter")]
    RhoQuarter,
    /// (n−2) K vs ½ tr D with `sec ≤ K ≤ 0`.
    #[serde(rename = "sectional")]
    Sectional,
    #[serde(rename = "two-step")]
    TwoStep,
    /// max d_i vs tr D / (2 + √2).
    #[serde(rename = "ext-heuristic")]
    ExtHeuristic,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::Q => "q",
            Criterion::Einstein => "einstein",
            Criterion::RhoQuarter => "rho-quarter",
            Criterion::Sectional => "sectional",
            Criterion::TwoStep => "two-step",
            Criterion::ExtHeuristic => "ext-heuristic",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityCertificate {
    pub criterion: Criterion,
    pub lhs: f64,
    pub rhs: f64,
    pub verdict: Verdict,
    pub notes: String,
}

impl StabilityCertificate {
    fn compared(criterion: Criterion, lhs: f64, rhs: f64, tol: &Tolerances, notes: String) -> Self {
        Self {
            criterion,
            lhs,
            rhs,
            verdict: Verdict::compare(lhs, rhs, tol),
            notes,
        }
    }
}

fn require_soliton(report: &SolitonReport) -> Result<()> {
    if report.is_soliton {
        Ok(())
    } else {
        Err(Error::NotSoliton(report.defect))
    }
}

/// max R̊ vs −λ; not applicable unless the metric is Einstein.
pub fn einstein_certificate(pkg: &CurvaturePackage, report: &SolitonReport, tol: &Tolerances) -> Result<StabilityCertificate> {
    require_soliton(report)?;
    let max_rho = sym_spectrum(&rho_operator(pkg))?.max();
    if !report.is_einstein {
        return Ok(StabilityCertificate {
            criterion: Criterion::Einstein,
            lhs: max_rho,
            rhs: -report.lambda,
            verdict: Verdict::NotApplicable,
            notes: "metric is not Einstein".into(),
        });
    }
    Ok(StabilityCertificate::compared(
        Criterion::Einstein,
        max_rho,
        -report.lambda,
        tol,
        "max eig R̊ vs −λ".into(),
    ))
}

/// max Q vs ½ tr D, with the R̊ vs ¼ tr D check recorded in the notes.
pub fn q_certificate(pkg: &CurvaturePackage, report: &SolitonReport, tol: &Tolerances) -> Result<StabilityCertificate> {
    require_soliton(report)?;
    let max_q = sym_spectrum(&q_operator(pkg))?.max();
    let max_rho = sym_spectrum(&rho_operator(pkg))?.max();
    let quarter = 0.25 * report.trace_d;
    let secondary = Verdict::compare(max_rho, quarter, tol);
    Ok(StabilityCertificate::compared(
        Criterion::Q,
        max_q,
        0.5 * report.trace_d,
        tol,
        format!("max eig Q vs ½ tr D; rho-quarter: max R̊ = {max_rho:.9} vs ¼ tr D = {quarter:.9} ({secondary})"),
    ))
}

/// Einstein metrics use max R̊ vs −λ, all other solitons max Q vs ½ tr D.
pub fn stability_certificate(pkg: &CurvaturePackage, report: &SolitonReport, tol: &Tolerances) -> Result<StabilityCertificate> {
    if report.is_einstein {
        einstein_certificate(pkg, report, tol)
    } else {
        q_certificate(pkg, report, tol)
    }
}

/// `(n−2) K < ½ tr D` with `K` the top eigenvalue of the Λ² curvature operator.
///
/// Not applicable once a plane of positive curvature is found. Einstein
/// metrics use `tr D = 0`.
pub fn sectional_certificate_with(
    pkg: &CurvaturePackage,
    report: &SolitonReport,
    scan: &SectionalScan,
    tol: &Tolerances,
) -> Result<StabilityCertificate> {
    require_soliton(report)?;
    let n = pkg.dim() as f64;
    let k = scan.lambda2_max;
    let trace = if report.is_einstein { 0.0 } else { report.trace_d };
    let lhs = (n - 2.0) * k;
    let rhs = 0.5 * trace;
    let zero_band = tol.verdict_band(k, 0.0) * 1e-3;
    if scan.has_positive(zero_band) {
        return Ok(StabilityCertificate {
            criterion: Criterion::Sectional,
            lhs,
            rhs,
            verdict: Verdict::NotApplicable,
            notes: format!(
                "positive sectional curvature {:.9} found (sampled range [{:.9}, {:.9}])",
                scan.sampled_max, scan.sampled_min, scan.sampled_max
            ),
        });
    }
    let notes = format!(
        "K = {k:.9} from Λ² operator; sampled range [{:.9}, {:.9}]",
        scan.sampled_min, scan.sampled_max
    );
    if k > zero_band {
        return Ok(StabilityCertificate {
            criterion: Criterion::Sectional,
            lhs,
            rhs,
            verdict: Verdict::Inconclusive,
            notes: format!("{notes}; bound K is positive"),
        });
    }
    Ok(StabilityCertificate::compared(Criterion::Sectional, lhs, rhs, tol, notes))
}

pub fn sectional_certificate(pkg: &CurvaturePackage, report: &SolitonReport, tol: &Tolerances, exec: Execution) -> Result<StabilityCertificate> {
    let scan = sectional_scan(pkg, DEFAULT_SAMPLES, DEFAULT_SEED, exec)?;
    sectional_certificate_with(pkg, report, &scan, tol)
}

/// `ρ₋, ρ₊ < ¼ tr D` and `½ q ρ₋ + (p+1) ρ₊ < tr D`; reports the worst of the three.
pub fn two_step_certificate(pkg: &CurvaturePackage, report: &SolitonReport, tol: &Tolerances) -> Result<StabilityCertificate> {
    let rho = rho_pm(pkg)?;
    require_soliton(report)?;
    let trd = report.trace_d;
    let (p, q) = (rho.p as f64, rho.q as f64);
    let conds = [
        ("rho_minus < tr D/4", rho.rho_minus, 0.25 * trd),
        ("rho_plus < tr D/4", rho.rho_plus, 0.25 * trd),
        ("q rho_minus/2 + (p+1) rho_plus < tr D", 0.5 * q * rho.rho_minus + (p + 1.0) * rho.rho_plus, trd),
    ];
    let verdicts: Vec<Verdict> = conds.iter().map(|&(_, l, r)| Verdict::compare(l, r, tol)).collect();
    let worst = (0..3)
        .max_by(|&a, &b| {
            verdicts[a]
                .severity()
                .cmp(&verdicts[b].severity())
                .then((conds[a].1 - conds[a].2).total_cmp(&(conds[b].1 - conds[b].2)))
        })
        .unwrap();
    let notes = format!(
        "p = {}, q = {}, rho_minus = {:.9}, rho_plus = {:.9}; {}",
        rho.p,
        rho.q,
        rho.rho_minus,
        rho.rho_plus,
        conds
            .iter()
            .zip(&verdicts)
            .map(|(&(name, l, r), v)| format!("{name}: {l:.9} vs {r:.9} ({v})"))
            .collect::<Vec<_>>()
            .join("; ")
    );
    Ok(StabilityCertificate {
        criterion: Criterion::TwoStep,
        lhs: conds[worst].1,
        rhs: conds[worst].2,
        verdict: verdicts[worst],
        notes,
    })
}

/// max eigenvalue of D vs tr D / (2 + √2).
pub fn extension_heuristic_certificate(report: &SolitonReport, tol: &Tolerances) -> Result<StabilityCertificate> {
    require_soliton(report)?;
    let max_d = symmetric_eigen(&report.d)?.max();
    let rhs = report.trace_d / (2.0 + std::f64::consts::SQRT_2);
    Ok(StabilityCertificate::compared(
        Criterion::ExtHeuristic,
        max_d,
        rhs,
        tol,
        "strict: R̊-stability of the rank-one Einstein extension implies Q-stability of the nilsoliton".into(),
    ))
}

/// Extremal Ricci eigenvalues on the two blocks of a two-step algebra.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RhoPm {
    pub p: usize,
    pub q: usize,
    pub rho_minus: f64,
    pub rho_plus: f64,
}

pub fn rho_pm(pkg: &CurvaturePackage) -> Result<RhoPm> {
    let split = pkg.algebra().two_step_split()?;
    let rv = split.v.transpose() * &pkg.ric * &split.v;
    let rz = split.z.transpose() * &pkg.ric * &split.z;
    let rho_minus = if split.q() == 0 { 0.0 } else { -symmetric_eigen(&rv)?.min() };
    Ok(RhoPm {
        p: split.p(),
        q: split.q(),
        rho_minus,
        rho_plus: symmetric_eigen(&rz)?.max(),
    })
}

/// Bounds checked after rescaling to `scal = −1`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TwoStepBounds {
    /// Factor applied to the structure constants.
    pub scale: f64,
    pub ric_norm_sq: f64,
    pub rho_minus: f64,
    pub rho_plus: f64,
    /// `1/p + 4/q`.
    pub lower_bound: f64,
    pub rho_ok: bool,
    pub norm_ok: bool,
    /// `|Ric|² = 1/p + 4/q` to within 1e−9.
    pub equality: bool,
}

pub fn two_step_ricci_bounds(alg: &MetricLieAlgebra) -> Result<TwoStepBounds> {
    let pkg = CurvaturePackage::compute(alg);
    if pkg.scal == 0.0 || pkg.scal.abs() <= 1e-14 * pkg.ric.norm().max(f64::MIN_POSITIVE) {
        return Err(Error::ZeroScalar);
    }
    alg.two_step_split()?;
    let s = (-1.0 / pkg.scal).sqrt();
    if !s.is_finite() {
        return Err(Error::Unachievable("scalar curvature is positive".into()));
    }
    let norm = CurvaturePackage::compute(&alg.scaled(s));
    let rho = rho_pm(&norm)?;
    let ric_norm_sq = norm.ric.iter().map(|v| v * v).sum::<f64>();
    let lower_bound = 1.0 / rho.p as f64 + 4.0 / rho.q as f64;
    let eps = 1e-9 * ric_norm_sq.max(1.0);
    Ok(TwoStepBounds {
        scale: s,
        ric_norm_sq,
        rho_minus: rho.rho_minus,
        rho_plus: rho.rho_plus,
        lower_bound,
        rho_ok: rho.rho_minus <= ric_norm_sq + eps && rho.rho_plus <= ric_norm_sq + eps,
        norm_ok: ric_norm_sq >= lower_bound - eps,
        equality: (ric_norm_sq - lower_bound).abs() <= eps,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormalizeTarget {
    Scal(f64),
    Lambda(f64),
}

/// Rescales the structure constants so the target is met; curvature scales by `s²`.
pub fn normalize(alg: &MetricLieAlgebra, target: NormalizeTarget) -> Result<MetricLieAlgebra> {
    let pkg = CurvaturePackage::compute(alg);
    let (current, wanted) = match target {
        NormalizeTarget::Scal(v) => (pkg.scal, v),
        NormalizeTarget::Lambda(v) => {
            if alg.is_abelian() {
                return Err(Error::Unachievable("abelian algebras have no scale".into()));
            }
            (detect_soliton_with(&pkg).lambda, v)
        }
    };
    if current.abs() <= 1e-14 * pkg.ric.norm().max(f64::MIN_POSITIVE) || current == 0.0 {
        return Err(Error::Unachievable("current value is zero".into()));
    }
    let s2 = wanted / current;
    if !(s2 > 0.0) || !s2.is_finite() {
        return Err(Error::Unachievable(format!("cannot move {current} to {wanted} by scaling")));
    }
    let out = alg.scaled(s2.sqrt());
    let check = CurvaturePackage::compute(&out);
    let got = match target {
        NormalizeTarget::Scal(_) => check.scal,
        NormalizeTarget::Lambda(_) => detect_soliton_with(&check).lambda,
    };
    if (got - wanted).abs() > 1e-10 * wanted.abs().max(1.0) {
        return Err(Error::Unachievable(format!("reached {got} instead of {wanted}")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nil3() -> MetricLieAlgebra {
        MetricLieAlgebra::from_entries(3, &[(0, 1, 2, 1.0)], "nil3").unwrap()
    }

    #[test]
    fn nil3_soliton() {
        let r = detect_soliton(&nil3());
        assert!((r.lambda + 1.5).abs() < 1e-14);
        assert!((r.trace_d - 4.0).abs() < 1e-14);
        assert!(r.is_soliton && !r.is_einstein);
        assert!(r.defect < 1e-12);
    }

    #[test]
    fn abelian_convention() {
        let r = detect_soliton(&MetricLieAlgebra::abelian(3));
        assert_eq!(r.lambda, -1.0);
        assert_eq!(r.d, DMatrix::identity(3, 3));
        assert!(r.is_soliton && !r.is_einstein);
    }

    #[test]
    fn verdict_bands() {
        let t = Tolerances::default();
        assert_eq!(Verdict::compare(0.5, 1.0, &t), Verdict::Strict);
        assert_eq!(Verdict::compare(1.0 + 1e-9, 1.0, &t), Verdict::Weak);
        assert_eq!(Verdict::compare(1.1, 1.0, &t), Verdict::Inconclusive);
    }

    #[test]
    fn nil3_certificates() {
        let pkg = CurvaturePackage::compute(&nil3());
        let r = detect_soliton_with(&pkg);
        let t = Tolerances::default();
        let q = stability_certificate(&pkg, &r, &t).unwrap();
        assert_eq!(q.criterion, Criterion::Q);
        assert_eq!(q.verdict, Verdict::Strict);
        assert!((q.rhs - 2.0).abs() < 1e-14);
        let ts = two_step_certificate(&pkg, &r, &t).unwrap();
        assert_eq!(ts.verdict, Verdict::Strict);
        let s = sectional_certificate(&pkg, &r, &t, Execution::Sequential).unwrap();
        assert_eq!(s.verdict, Verdict::NotApplicable);
        let h = extension_heuristic_certificate(&r, &t).unwrap();
        assert_eq!(h.verdict, Verdict::Inconclusive);
        assert!((h.lhs - 2.0).abs() < 1e-12);
    }

    #[test]
    fn two_step_on_abelian_errors() {
        let pkg = CurvaturePackage::compute(&MetricLieAlgebra::abelian(3));
        let r = detect_soliton_with(&pkg);
        assert!(matches!(two_step_certificate(&pkg, &r, &Tolerances::default()), Err(Error::NotTwoStep)));
        assert!(matches!(two_step_ricci_bounds(&MetricLieAlgebra::abelian(3)), Err(Error::ZeroScalar)));
    }

    #[test]
    fn two_step_bounds_nil3() {
        let b = two_step_ricci_bounds(&nil3()).unwrap();
        assert!((b.scale - 2f64.sqrt()).abs() < 1e-14);
        assert!((b.ric_norm_sq - 3.0).abs() < 1e-12);
        assert!(b.equality && b.rho_ok && b.norm_ok);
        assert!((b.rho_minus - 1.0).abs() < 1e-12 && (b.rho_plus - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normalize_nil3() {
        let g = normalize(&nil3(), NormalizeTarget::Scal(-1.0)).unwrap();
        assert!((g.constants().get(0, 1, 2) - 2f64.sqrt()).abs() < 1e-14);
        assert!(normalize(&MetricLieAlgebra::abelian(2), NormalizeTarget::Scal(-1.0)).is_err());
        let l = normalize(&nil3(), NormalizeTarget::Lambda(-1.0)).unwrap();
        assert!((detect_soliton(&l).lambda + 1.0).abs() < 1e-12);
    }
}
