//! Numerical tolerances shared by every comparison in the crate.

use crate::error::{CoherenceError, Result};

/// Named tolerances. Constructions in this crate are exact in exact
/// arithmetic; these only absorb floating-point error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    /// Unit-norm and unit-sum checks.
    pub norm_tol: f64,
    /// Hermiticity of density matrices and observables.
    pub herm_tol: f64,
    /// Smallest admissible eigenvalue is `-psd_tol`.
    pub psd_tol: f64,
    /// Max-entry residual of `sum K^dag K - I`.
    pub complete_tol: f64,
    /// Slack on majorization partial sums.
    pub major_tol: f64,
    /// Purity and fidelity comparisons.
    pub purity_tol: f64,
    /// Magnitudes at or below this are treated as zero.
    pub nonneg_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            norm_tol: 1e-10,
            herm_tol: 1e-10,
            psd_tol: 1e-9,
            complete_tol: 1e-9,
            major_tol: 1e-10,
            purity_tol: 1e-10,
            nonneg_tol: 1e-12,
        }
    }
}

impl ToleranceConfig {
    /// Checks that every tolerance is finite and strictly positive.
    pub fn validate(&self) -> Result<()> {
        for (name, value) in self.named() {
            if !(value.is_finite() && value > 0.0) {
                return Err(CoherenceError::InvalidTolerance { name, value });
            }
        }
        Ok(())
    }

    pub fn named(&self) -> [(&'static str, f64); 7] {
        [
            ("norm_tol", self.norm_tol),
            ("herm_tol", self.herm_tol),
            ("psd_tol", self.psd_tol),
            ("complete_tol", self.complete_tol),
            ("major_tol", self.major_tol),
            ("purity_tol", self.purity_tol),
            ("nonneg_tol", self.nonneg_tol),
        ]
    }
}
