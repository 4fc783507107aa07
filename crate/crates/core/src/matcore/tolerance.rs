use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical thresholds shared by all routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Singular values below `rank_rel * max(m, n) * σ₁` count as zero.
    pub rank_rel: f64,
    /// Absolute residual used for identity and membership checks.
    pub residual_abs: f64,
    /// Fraction of a theoretical radius actually used when sampling neighbourhoods.
    pub neighborhood_shrink: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self { rank_rel: 1e-10, residual_abs: 1e-10, neighborhood_shrink: 0.5 }
    }
}

impl ToleranceConfig {
    pub fn new(rank_rel: f64, residual_abs: f64, neighborhood_shrink: f64) -> Result<Self> {
        let t = Self { rank_rel, residual_abs, neighborhood_shrink };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !ok(self.rank_rel) || !ok(self.residual_abs) || !ok(self.neighborhood_shrink) {
            return Err(Error::input("tolerances must be positive and finite"));
        }
        if self.neighborhood_shrink >= 1.0 {
            return Err(Error::input("neighborhood_shrink must lie in (0, 1)"));
        }
        Ok(())
    }
}
