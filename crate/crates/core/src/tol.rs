//! Numerical cutoffs shared across the crate.

/// Jacobi-identity and derivation acceptance threshold.
pub const TOL_STRUCTURE: f64 = 1e-10;

/// Relative singular-value cutoff for every rank and nullspace decision.
pub const TOL_RANK: f64 = 1e-9;

/// Soliton acceptance, relative to the Frobenius norm of Ricci.
pub const TOL_SOLITON_REL: f64 = 1e-8;

/// Default relative band used when comparing certificate sides.
pub const TOL_VERDICT_REL: f64 = 1e-6;

/// Environment variable that overrides [`TOL_VERDICT_REL`].
pub const VERDICT_ENV: &str = "RICCI_STAB_TOL";

/// Tolerances applied when issuing verdicts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub verdict_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            verdict_rel: TOL_VERDICT_REL,
        }
    }
}

impl Tolerances {
    /// Defaults, with `RICCI_STAB_TOL` taking precedence when it parses to a positive number.
    pub fn from_env() -> Self {
        let mut tol = Self::default();
        if let Some(v) = std::env::var(VERDICT_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .filter(|v| v.is_finite() && *v > 0.0)
        {
            tol.verdict_rel = v;
        }
        tol
    }

    /// Absolute comparison band for a pair of certificate sides.
    pub fn verdict_band(&self, lhs: f64, rhs: f64) -> f64 {
        self.verdict_rel * lhs.abs().max(rhs.abs()).max(1.0)
    }
}
