use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{inv_reg_upper_gamma, ln_gamma_unchecked, lower_unchecked, upper_unchecked};

/// Unit Gamma distribution with mean `mu` and shape `tau`.
///
/// If `X` has this law then `−θ ln X ~ Gamma(τ, 1)` with
/// `θ = mu^{1/τ} / (1 − mu^{1/τ})`, which gives the cdf, quantile and sampler.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitGammaMeanShape {
    pub mu: f64,
    pub tau: f64,
}

impl UnitGammaMeanShape {
    pub fn new(mu: f64, tau: f64) -> Result<Self> {
        if !(mu > 0.0 && mu < 1.0) || !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::domain(format!(
                "unit gamma model requires 0 < mu < 1 and tau > 0, got ({mu}, {tau})"
            )));
        }
        let m = UnitGammaMeanShape { mu, tau };
        let theta = m.theta();
        if !(theta > 0.0) || !theta.is_finite() {
            return Err(Error::domain(format!(
                "unit gamma model: theta is not representable for ({mu}, {tau})"
            )));
        }
        Ok(m)
    }

    /// `θ = mu^{1/τ} / (1 − mu^{1/τ})`.
    pub fn theta(&self) -> f64 {
        let ln_m = self.mu.ln() / self.tau;
        // 1 − mu^{1/τ} suffers cancellation for large τ; use expm1.
        ln_m.exp() / -ln_m.exp_m1()
    }

    pub(crate) fn ln_pdf(&self, x: f64) -> f64 {
        let theta = self.theta();
        let t = self.tau;
        t * theta.ln() - ln_gamma_unchecked(t) + (theta - 1.0) * x.ln() + (t - 1.0) * (-x.ln()).ln()
    }

    pub(crate) fn cdf(&self, x: f64) -> f64 {
        upper_unchecked(self.tau, -self.theta() * x.ln())
    }

    pub(crate) fn sf(&self, x: f64) -> f64 {
        lower_unchecked(self.tau, -self.theta() * x.ln())
    }

    pub(crate) fn quantile(&self, p: f64) -> Result<f64> {
        let g = inv_reg_upper_gamma(self.tau, p)?;
        Ok((-g / self.theta()).exp())
    }

    /// `mu (1 / (2 − mu^{1/τ})^τ − mu)`.
    pub(crate) fn variance(&self) -> f64 {
        let m = (self.mu.ln() / self.tau).exp();
        self.mu * ((-self.tau * (2.0 - m).ln()).exp() - self.mu)
    }

    /// `E[X^k] = (θ / (θ + k))^τ`.
    fn raw_moment(&self, k: f64) -> f64 {
        (-self.tau * (k / self.theta()).ln_1p()).exp()
    }

    pub(crate) fn shape_moments(&self) -> (f64, f64) {
        let m1 = self.mu;
        let m2 = self.raw_moment(2.0);
        let m3 = self.raw_moment(3.0);
        let m4 = self.raw_moment(4.0);
        let var = self.variance();
        let c3 = m3 - 3.0 * m1 * m2 + 2.0 * m1.powi(3);
        let c4 = m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1.powi(4);
        (c3 / var.powf(1.5), c4 / (var * var))
    }
}
