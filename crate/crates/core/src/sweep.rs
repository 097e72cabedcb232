//! One-parameter sweeps written as CSV.
//!
//! Columns: `t,max_eig,threshold,verdict,max_eig_3dp,threshold_3dp`. Floats
//! use 9 significant digits; the `_3dp` columns round to three decimals.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::catalog;
use crate::construct;
use crate::curvature::CurvaturePackage;
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::soliton::{detect_soliton_with, einstein_certificate, q_certificate, stability_certificate, Verdict};
use crate::tol::Tolerances;

pub const CSV_HEADER: &str = "t,max_eig,threshold,verdict,max_eig_3dp,threshold_3dp";

#[derive(Debug, Clone)]
pub enum Family {
    /// Einstein extension of the Lauret curve: max R̊ vs −λ.
    LauretCurve,
    /// nil3 solvsoliton family: max Q vs ½ tr D.
    Nil3Family,
    /// One row per A-matrix, `t` is its 0-based index.
    DiagonalAbelian(Vec<DMatrix<f64>>),
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::LauretCurve => "lauret_curve",
            Family::Nil3Family => "nil3_family",
            Family::DiagonalAbelian(_) => "diagonal_abelian",
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        match self {
            Family::LauretCurve => t > 0.0 && t < 1.0,
            Family::Nil3Family => catalog::nil3_family_domain(t),
            Family::DiagonalAbelian(m) => t >= 0.0 && t.fract() == 0.0 && (t as usize) < m.len(),
        }
    }
}

/// Parses a JSON list of `n×m` matrices (nested row arrays).
pub fn parse_matrices(text: &str) -> Result<Vec<DMatrix<f64>>> {
    let raw: Vec<Vec<Vec<f64>>> = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    raw.into_iter()
        .map(|rows| {
            let r = rows.len();
            let c = rows.first().map_or(0, Vec::len);
            if r == 0 || c == 0 || rows.iter().any(|x| x.len() != c) {
                return Err(Error::Parse("A-matrix rows must be non-empty and equal length".into()));
            }
            Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
        })
        .collect()
}

/// Inclusive uniform grid `start:end:steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl Grid {
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("range `{s}` must look like a:b:steps")));
        }
        let num = |p: &str| p.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number `{p}` in range")));
        let (start, end) = (num(parts[0])?, num(parts[1])?);
        let steps: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad step count `{}`", parts[2])))?;
        if steps == 0 || !start.is_finite() || !end.is_finite() || end < start {
            return Err(Error::Parse(format!("range `{s}` needs steps >= 1 and a <= b")));
        }
        Ok(Self { start, end, steps })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let h = (self.end - self.start) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| if i + 1 == self.steps { self.end } else { self.start + h * i as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub t: f64,
    pub max_eig: f64,
    pub threshold: f64,
    pub verdict: Verdict,
}

fn evaluate(family: &Family, t: f64, tol: &Tolerances) -> Result<SweepRow> {
    let (alg, einstein) = match family {
        Family::LauretCurve => (construct::einstein_rank_one_extension(&catalog::lauret_curve(t)?)?, Some(true)),
        Family::Nil3Family => (catalog::nil3_family(t)?, Some(false)),
        Family::DiagonalAbelian(ms) => (construct::diagonal_abelian_solvsoliton(&ms[t as usize])?, None),
    };
    let pkg = CurvaturePackage::compute_with(&alg, Execution::Sequential);
    let report = detect_soliton_with(&pkg);
    let cert = match einstein {
        Some(true) => einstein_certificate(&pkg, &report, tol)?,
        Some(false) => q_certificate(&pkg, &report, tol)?,
        None => stability_certificate(&pkg, &report, tol)?,
    };
    Ok(SweepRow {
        t,
        max_eig: cert.lhs,
        threshold: cert.rhs,
        verdict: cert.verdict,
    })
}

/// Evaluates every grid point; rows come back in grid order.
pub fn run_sweep(family: &Family, grid: Option<Grid>, exec: Execution, tol: &Tolerances) -> Result<Vec<SweepRow>> {
    let ts: Vec<f64> = match (family, grid) {
        (Family::DiagonalAbelian(ms), None) => (0..ms.len()).map(|i| i as f64).collect(),
        (_, Some(g)) => g.points(),
        (_, None) => return Err(Error::Parse(format!("family `{}` needs a range", family.name()))),
    };
    if let Some(bad) = ts.iter().find(|&&t| !family.contains(t)) {
        return Err(Error::OutOfRange(format!("t = {bad} is outside the domain of `{}`", family.name())));
    }
    par::map_slice(exec, &ts, |&t| evaluate(family, t, tol))
        .into_iter()
        .collect()
}

/// `x` with `digits` significant digits, in plain or scientific notation.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{}", if x == 0.0 { 0.0 } else { x });
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-5..=15).contains(&mag) {
        return format!("{:.*e}", digits - 1, x);
    }
    let decimals = (digits as i32 - 1 - mag).max(0) as usize;
    let s = format!("{:.*}", decimals, x);
    if s.parse::<f64>().is_ok_and(|v| v == 0.0) {
        "0".into()
    } else {
        s
    }
}

pub fn fmt_3dp(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_sig(r.t, 9),
            fmt_sig(r.max_eig, 9),
            fmt_sig(r.threshold, 9),
            r.verdict,
            fmt_3dp(r.max_eig),
            fmt_3dp(r.threshold)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_points() {
        let g = Grid::parse("0.05:0.95:19").unwrap();
        let p = g.points();
        assert_eq!(p.len(), 19);
        assert_eq!(p[18], 0.95);
        assert!((p[1] - 0.1).abs() < 1e-15);
        assert_eq!(Grid::parse("0.5:0.5:1").unwrap().points(), vec![0.5]);
        assert!(Grid::parse("1:0:3").is_err());
        assert!(Grid::parse("0:1").is_err());
    }

    #[test]
    fn sig_digits() {
        assert_eq!(fmt_sig(1.0, 9), "1.00000000");
        assert_eq!(fmt_sig(0.568729, 9), "0.568729000");
        assert_eq!(fmt_sig(-2.5, 9), "-2.50000000");
        assert_eq!(fmt_sig(0.0, 9), "0");
        assert_eq!(fmt_3dp(-1e-12), "0.000");
    }

    #[test]
    fn domain_errors() {
        let t = Tolerances::default();
        let g = Grid::parse("0.5:1.0:3").unwrap();
        assert!(matches!(run_sweep(&Family::LauretCurve, Some(g), Execution::Sequential, &t), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn single_point_nil3_family() {
        let t = Tolerances::default();
        let rows = run_sweep(&Family::Nil3Family, Some(Grid::parse("0.5:0.5:1").unwrap()), Execution::Sequential, &t).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].verdict, Verdict::Strict);
        assert!(to_csv(&rows).lines().count() == 2);
    }
}
