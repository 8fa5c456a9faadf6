//! Phase I analysis: likelihood fits, model ranking, goodness of fit and the
//! runs test for randomness.

mod gof;
mod runs;

pub use gof::{ad_statistic, ad_test, ks_test, AdMethod, GofReport, TestResult};
pub use runs::{runs_test, RunsMethod, RunsTestReport};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{check_data, Family, Likelihood, UnitModel};
use crate::numerics::{minimize, numeric_hessian, Tolerance};

/// Maximum-likelihood fit of one family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub family: Family,
    /// `[mu, dispersion]`.
    pub estimates: [f64; 2],
    pub std_errors: [f64; 2],
    pub loglik: f64,
    pub aic: f64,
    pub bic: f64,
    pub n: usize,
}

impl FitReport {
    pub fn model(&self) -> Result<UnitModel> {
        UnitModel::new(self.family, self.estimates[0], self.estimates[1])
    }
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

fn logistic(y: f64) -> f64 {
    1.0 / (1.0 + (-y).exp())
}

/// Moment-based starting value for the dispersion parameter.
fn start_dispersion(family: Family, mean: f64, var: f64) -> f64 {
    let var = var.max(1e-12);
    let q = mean * (1.0 - mean);
    let d = match family {
        Family::Beta => q / var - 1.0,
        Family::Simplex => (var / (q * q * q)).sqrt(),
        Family::UnitGamma => (mean.ln()).powi(2) * mean * mean / var,
    };
    if d.is_finite() && d > 0.0 {
        d.clamp(1e-3, 1e6)
    } else {
        1.0
    }
}

/// Maximizes the log-likelihood over `(logit mu, ln dispersion)` by BFGS.
/// Standard errors come from the inverse numerical Hessian in those
/// coordinates, mapped back by the delta method.
pub fn fit_mle(family: Family, data: &[f64]) -> Result<FitReport> {
    if data.len() < 3 {
        return Err(Error::Estimation(format!("need at least 3 observations, got {}", data.len())));
    }
    check_data(data)?;
    let n = data.len() as f64;
    let mean = data.iter().sum::<f64>() / n;
    let var = data.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let lik = Likelihood::new(family, data);
    let objective = |t: &[f64]| -lik.eval(logistic(t[0]), t[1].exp());
    // The score is a sum over observations, so its noise floor grows with n.
    let tol = Tolerance {
        abs: 1e-9 * n.max(10.0),
        rel: 1e-10,
        max_iter: 1000,
    };

    let d0 = start_dispersion(family, mean, var);
    let mut best: Option<crate::numerics::Minimum> = None;
    let mut last_err = None;
    for scale in [1.0, 0.2, 5.0] {
        match minimize(objective, &[logit(mean), (d0 * scale).ln()], tol) {
            Ok(m) => {
                if best.as_ref().is_none_or(|b| m.value < b.value) {
                    best = Some(m);
                }
            }
            Err(e) => last_err = Some(e),
        }
        if best.is_some() && scale == 1.0 {
            break;
        }
    }
    let Some(best) = best else {
        let detail = last_err.map(|e| e.to_string()).unwrap_or_default();
        return Err(Error::Estimation(format!("{family} fit did not converge: {detail}")));
    };
    let (t_mu, t_d) = (best.argmin[0], best.argmin[1]);
    let (mu, d) = (logistic(t_mu), t_d.exp());
    let loglik = -best.value;
    if loglik <= crate::models::INVALID_LOGLIK / 2.0 {
        return Err(Error::Estimation(format!("{family} fit ended outside the parameter space")));
    }

    let h = numeric_hessian(objective, &best.argmin, 1e-4)?;
    let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    if !(det > 0.0 && h[0][0] > 0.0) {
        return Err(Error::Estimation(format!(
            "{family} fit: observed information is not positive definite (det {det:e})"
        )));
    }
    let cov_mu = h[1][1] / det;
    let cov_d = h[0][0] / det;
    let std_errors = [cov_mu.sqrt() * mu * (1.0 - mu), cov_d.sqrt() * d];
    Ok(FitReport {
        family,
        estimates: [mu, d],
        std_errors,
        loglik,
        aic: -2.0 * loglik + 4.0,
        bic: -2.0 * loglik + 2.0 * n.ln(),
        n: data.len(),
    })
}

/// Sorts by AIC, then BIC, then family order. Stable for exact duplicates.
pub fn select_model(reports: &[FitReport]) -> Vec<FitReport> {
    let mut out = reports.to_vec();
    out.sort_by(|a, b| {
        a.aic
            .total_cmp(&b.aic)
            .then(a.bic.total_cmp(&b.bic))
            .then(a.family.cmp(&b.family))
    });
    out
}

/// Options for [`phase1_analysis`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Phase1Options {
    pub ad_method: AdMethod,
    pub runs_method: RunsMethod,
}

impl Default for Phase1Options {
    fn default() -> Self {
        Phase1Options {
            ad_method: AdMethod::Bootstrap { resamples: 1000, seed: 0 },
            runs_method: RunsMethod::Normal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyAnalysis {
    pub fit: FitReport,
    pub gof: GofReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phase1Report {
    pub n: usize,
    pub runs: RunsTestReport,
    /// Ranked best first.
    pub families: Vec<FamilyAnalysis>,
}

impl Phase1Report {
    pub fn best(&self) -> &FamilyAnalysis {
        &self.families[0]
    }
}

/// Runs test, all three fits, goodness of fit, ranked by AIC.
pub fn phase1_analysis(data: &[f64], options: &Phase1Options) -> Result<Phase1Report> {
    check_data(data)?;
    let runs = runs_test(data, options.runs_method)?;
    let fits = Family::ALL.iter().map(|&f| fit_mle(f, data)).collect::<Result<Vec<_>>>()?;
    let families = select_model(&fits)
        .into_iter()
        .map(|fit| {
            let gof = gof::gof_report(data, &fit, options.ad_method)?;
            Ok(FamilyAnalysis { fit, gof })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Phase1Report {
        n: data.len(),
        runs,
        families,
    })
}
