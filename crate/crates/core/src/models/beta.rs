use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{inv_reg_inc_beta, ln_beta};

/// Beta distribution with mean `mu` and precision `phi`, i.e. shapes
/// `α = mu·phi` and `β = (1 − mu)·phi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaMeanPrecision {
    pub mu: f64,
    pub phi: f64,
}

impl BetaMeanPrecision {
    pub fn new(mu: f64, phi: f64) -> Result<Self> {
        if !(mu > 0.0 && mu < 1.0) || !(phi > 0.0) || !phi.is_finite() {
            return Err(Error::domain(format!(
                "beta model requires 0 < mu < 1 and phi > 0, got ({mu}, {phi})"
            )));
        }
        Ok(BetaMeanPrecision { mu, phi })
    }

    pub fn alpha(&self) -> f64 {
        self.mu * self.phi
    }

    pub fn beta(&self) -> f64 {
        (1.0 - self.mu) * self.phi
    }

    pub(crate) fn ln_pdf(&self, x: f64) -> f64 {
        let (a, b) = (self.alpha(), self.beta());
        (a - 1.0) * x.ln() + (b - 1.0) * (-x).ln_1p() - ln_beta(a, b)
    }

    pub(crate) fn cdf(&self, x: f64) -> f64 {
        crate::numerics::beta_both(x, self.alpha(), self.beta()).0
    }

    pub(crate) fn sf(&self, x: f64) -> f64 {
        crate::numerics::beta_both(x, self.alpha(), self.beta()).1
    }

    pub(crate) fn quantile(&self, p: f64) -> Result<f64> {
        inv_reg_inc_beta(p, self.alpha(), self.beta())
    }

    pub(crate) fn variance(&self) -> f64 {
        self.mu * (1.0 - self.mu) / (self.phi + 1.0)
    }

    /// Closed-form skewness and kurtosis (normal = 3).
    pub(crate) fn shape_moments(&self) -> (f64, f64) {
        let (a, b) = (self.alpha(), self.beta());
        let s = a + b;
        let skew = 2.0 * (b - a) * (s + 1.0).sqrt() / ((s + 2.0) * (a * b).sqrt());
        let excess = 6.0 * ((a - b).powi(2) * (s + 1.0) - a * b * (s + 2.0))
            / (a * b * (s + 2.0) * (s + 3.0));
        (skew, excess + 3.0)
    }
}
