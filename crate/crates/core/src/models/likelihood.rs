use super::{Family, UnitModel, INVALID_LOGLIK};
use crate::numerics::{ln_beta, ln_gamma_unchecked};

/// Log-likelihood of a fixed sample, with the data-only sums cached so each
/// evaluation costs O(1) for Beta and Unit Gamma.
#[derive(Debug, Clone)]
pub struct Likelihood<'a> {
    family: Family,
    data: &'a [f64],
    n: f64,
    sum_ln_x: f64,
    sum_ln_1mx: f64,
    sum_ln_neg_ln_x: f64,
}

impl<'a> Likelihood<'a> {
    /// `data` must already be checked to lie in `(0, 1)`.
    pub fn new(family: Family, data: &'a [f64]) -> Self {
        let mut s = Likelihood {
            family,
            data,
            n: data.len() as f64,
            sum_ln_x: 0.0,
            sum_ln_1mx: 0.0,
            sum_ln_neg_ln_x: 0.0,
        };
        for &x in data {
            s.sum_ln_x += x.ln();
            s.sum_ln_1mx += (-x).ln_1p();
            s.sum_ln_neg_ln_x += (-x.ln()).ln();
        }
        s
    }

    /// Log-likelihood, or [`INVALID_LOGLIK`] outside the parameter space.
    pub fn eval(&self, mu: f64, dispersion: f64) -> f64 {
        let Ok(model) = UnitModel::new(self.family, mu, dispersion) else {
            return INVALID_LOGLIK;
        };
        let ll = match model {
            UnitModel::Beta(m) => {
                let (a, b) = (m.alpha(), m.beta());
                (a - 1.0) * self.sum_ln_x + (b - 1.0) * self.sum_ln_1mx - self.n * ln_beta(a, b)
            }
            UnitModel::UnitGamma(m) => {
                let (theta, tau) = (m.theta(), m.tau);
                self.n * (tau * theta.ln() - ln_gamma_unchecked(tau))
                    + (theta - 1.0) * self.sum_ln_x
                    + (tau - 1.0) * self.sum_ln_neg_ln_x
            }
            UnitModel::Simplex(m) => {
                let s2 = m.sigma * m.sigma;
                let dev: f64 = self.data.iter().map(|&x| m.deviance(x)).sum();
                -0.5 * self.n * (std::f64::consts::TAU * s2).ln()
                    - 1.5 * (self.sum_ln_x + self.sum_ln_1mx)
                    - dev / (2.0 * s2)
            }
        };
        if ll.is_finite() {
            ll
        } else {
            INVALID_LOGLIK
        }
    }
}
