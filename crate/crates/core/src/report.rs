//! Summary rows for catalog nilsolitons and their rank-one Einstein extensions,
//! each compared with published three-decimal reference values.

use serde::Serialize;

use crate::algebra::MetricLieAlgebra;
use crate::catalog;
use crate::construct;
use crate::curvature::CurvaturePackage;
use crate::error::Result;
use crate::par::{self, Execution};
use crate::soliton::{detect_soliton_with, stability_certificate, Verdict};
use crate::sweep::{fmt_3dp, fmt_sig};
use crate::symtensor::{q_operator, rho_operator, sym_spectrum};
use crate::tol::Tolerances;

/// Published values for one row, rounded to three decimals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Reference {
    /// Table cell as `table:dim#number`.
    pub cell: &'static str,
    pub lambda: f64,
    pub trace_d: f64,
    pub max_q: f64,
    pub ext_max_rho: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub label: String,
    pub dim: usize,
    pub step: Option<usize>,
    pub lambda: f64,
    pub trace_d: f64,
    pub max_q: f64,
    pub q_verdict: Verdict,
    pub ext_dim: usize,
    pub ext_max_rho: f64,
    pub ext_verdict: Verdict,
    pub reference: Option<Reference>,
    /// Largest absolute difference against `reference`.
    pub max_deviation: Option<f64>,
}

/// Catalog references with published values.
pub fn entries() -> Vec<(String, Option<Reference>)> {
    let r = |cell, lambda, trace_d, max_q, ext_max_rho| {
        Some(Reference {
            cell,
            lambda,
            trace_d,
            max_q,
            ext_max_rho,
        })
    };
    vec![
        ("abelian(1)".into(), r("1:1#1", -1.0, 1.0, 0.0, 1.0)),
        ("abelian(2)".into(), r("1:2#1", -1.0, 2.0, 0.0, 0.5)),
        ("abelian(3)".into(), r("1:3#2", -1.0, 3.0, 0.0, 0.333)),
        ("abelian(4)".into(), r("1:4#3", -1.0, 4.0, 0.0, 0.25)),
        ("abelian(5)".into(), r("1:5#9", -1.0, 5.0, 0.0, 0.2)),
        ("abelian(6)".into(), r("2:6#34", -1.0, 6.0, 0.0, 0.167)),
        ("nil3".into(), r("1:3#1", -1.5, 4.0, 0.569, 1.0)),
        ("nil3_plus_abelian(1)".into(), r("1:4#2", -1.5, 5.5, 0.569, 0.932)),
        ("nil3_plus_abelian(2)".into(), r("1:5#7", -1.5, 7.0, 0.569, 0.893)),
        ("nil3_plus_abelian(3)".into(), r("2:6#33", -1.5, 8.5, 0.569, 0.868)),
        ("heis(1,4)".into(), r("1:5#4", -2.0, 9.0, 1.106, 1.0)),
        ("heis(2,4)".into(), r("2:6#28", -3.0, 16.0, 1.137, 1.75)),
        ("mu11_diagonalized".into(), r("2:6#11", -1.44, 7.29, 0.732, 1.166)),
        ("free2(3)".into(), r("2:6#24", -2.5, 13.5, 0.581, 1.071)),
    ]
}

/// Builds one row for a nilsoliton.
pub fn row_for(alg: &MetricLieAlgebra, reference: Option<Reference>, tol: &Tolerances) -> Result<ReportRow> {
    let pkg = CurvaturePackage::compute_with(alg, Execution::Sequential);
    let report = detect_soliton_with(&pkg);
    let q_cert = stability_certificate(&pkg, &report, tol)?;
    let max_q = sym_spectrum(&q_operator(&pkg))?.max();

    let ext = construct::einstein_rank_one_extension(alg)?;
    let ext_pkg = CurvaturePackage::compute_with(&ext, Execution::Sequential);
    let ext_report = detect_soliton_with(&ext_pkg);
    let ext_cert = stability_certificate(&ext_pkg, &ext_report, tol)?;
    let ext_max_rho = sym_spectrum(&rho_operator(&ext_pkg))?.max();

    let max_deviation = reference.map(|r| {
        [
            (report.lambda - r.lambda).abs(),
            (report.trace_d - r.trace_d).abs(),
            (max_q - r.max_q).abs(),
            (ext_max_rho - r.ext_max_rho).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    });
    Ok(ReportRow {
        label: alg.label().to_string(),
        dim: alg.dim(),
        step: alg.structure_report().step,
        lambda: report.lambda,
        trace_d: report.trace_d,
        max_q,
        q_verdict: q_cert.verdict,
        ext_dim: ext.dim(),
        ext_max_rho,
        ext_verdict: ext_cert.verdict,
        reference,
        max_deviation,
    })
}

/// All report rows, computed independently and returned in catalog order.
pub fn build_report(exec: Execution, tol: &Tolerances) -> Result<Vec<ReportRow>> {
    let items = entries();
    par::map_slice(exec, &items, |(name, reference)| {
        let alg = catalog::resolve(name, &[])?;
        row_for(&alg, *reference, tol)
    })
    .into_iter()
    .collect()
}

fn mark(v: Verdict) -> &'static str {
    match v {
        Verdict::Strict => "yes",
        Verdict::Weak => "weak",
        Verdict::Inconclusive => "no",
        Verdict::NotApplicable => "n/a",
    }
}

/// Fixed-width text table.
pub fn format_table(rows: &[ReportRow]) -> String {
    let mut out = format!(
        "{:<22} {:>3} {:>4} {:>7} {:>7} {:>7} {:>5} | {:>3} {:>7} {:>5} | {:>7} {:>9}\n",
        "nilsoliton", "dim", "step", "lambda", "tr D", "max Q", "<trD/2", "dim", "max R", "<-lam", "ref", "deviation"
    );
    out.push_str(&"-".repeat(out.len() - 1));
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{:<22} {:>3} {:>4} {:>7} {:>7} {:>7} {:>6} | {:>3} {:>7} {:>5} | {:>7} {:>9}\n",
            r.label,
            r.dim,
            r.step.map_or("-".into(), |s| s.to_string()),
            fmt_3dp(r.lambda),
            fmt_3dp(r.trace_d),
            fmt_3dp(r.max_q),
            mark(r.q_verdict),
            r.ext_dim,
            fmt_3dp(r.ext_max_rho),
            mark(r.ext_verdict),
            r.reference.map_or("-", |x| x.cell),
            r.max_deviation.map_or("-".into(), |d| format!("{d:.1e}")),
        ));
    }
    out
}

pub const CSV_HEADER: &str = "label,dim,step,lambda,trace_d,max_q,q_verdict,ext_dim,ext_max_rho,ext_verdict,\
lambda_3dp,trace_d_3dp,max_q_3dp,ext_max_rho_3dp,ref_cell,max_deviation";

pub fn to_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "\"{}\",{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.label,
            r.dim,
            r.step.map_or(String::new(), |s| s.to_string()),
            fmt_sig(r.lambda, 9),
            fmt_sig(r.trace_d, 9),
            fmt_sig(r.max_q, 9),
            r.q_verdict,
            r.ext_dim,
            fmt_sig(r.ext_max_rho, 9),
            r.ext_verdict,
            fmt_3dp(r.lambda),
            fmt_3dp(r.trace_d),
            fmt_3dp(r.max_q),
            fmt_3dp(r.ext_max_rho),
            r.reference.map_or("", |x| x.cell),
            r.max_deviation.map_or(String::new(), |d| format!("{d:.3e}")),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nil3_row() {
        let row = row_for(&catalog::nil3(), entries()[6].1, &Tolerances::default()).unwrap();
        assert_eq!(row.step, Some(2));
        assert_eq!(row.q_verdict, Verdict::Strict);
        assert_eq!(row.ext_verdict, Verdict::Strict);
        assert!(row.max_deviation.unwrap() <= 5e-4);
    }
}
