use rand_distr::Distribution;
use serde::{Deserialize, Serialize};

use super::{fit_mle, FitReport};
use crate::error::{Error, Result};
use crate::models::UnitModel;
use crate::simulation::{par_map, substream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub stat: f64,
    pub pvalue: f64,
}

/// Anderson-Darling p-value method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum AdMethod {
    /// Parametric bootstrap: resample from the fitted model, refit, recompute.
    Bootstrap { resamples: usize, seed: u64 },
    /// Limiting law for a fully specified null (ignores estimation).
    Asymptotic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofReport {
    pub ad_stat: f64,
    pub ad_pvalue: f64,
    pub ks_stat: f64,
    /// Asymptotic Kolmogorov law; anti-conservative with estimated parameters.
    pub ks_pvalue: f64,
    pub ad_method: AdMethod,
}

fn sorted(data: &[f64]) -> Vec<f64> {
    let mut v = data.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// `P(K > x)` for the Kolmogorov distribution.
pub(crate) fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 0.3 {
        // Small-x form: P(K ≤ x) = √(2π)/x Σ exp(−(2k−1)²π²/(8x²)).
        let c = -std::f64::consts::PI.powi(2) / (8.0 * x * x);
        let s: f64 = (1..=5).map(|k| (c * ((2 * k - 1) as f64).powi(2)).exp()).sum();
        return (1.0 - (2.0 * std::f64::consts::PI).sqrt() / x * s).clamp(0.0, 1.0);
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * x * x).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// Kolmogorov-Smirnov distance to `model` with the asymptotic p-value at `√n·D`.
pub fn ks_test(data: &[f64], model: &UnitModel) -> Result<TestResult> {
    if data.is_empty() {
        return Err(Error::Test("KS test needs at least one observation".into()));
    }
    let xs = sorted(data);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &(f, _)) in model.cdf_sf_sorted(&xs)?.iter().enumerate() {
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(TestResult {
        stat: d,
        pvalue: kolmogorov_sf(n.sqrt() * d),
    })
}

/// `A² = −n − (1/n) Σ (2i − 1)[ln F(x₍ᵢ₎) + ln(1 − F(x₍ₙ₊₁₋ᵢ₎))]`.
pub fn ad_statistic(data: &[f64], model: &UnitModel) -> Result<f64> {
    if data.len() < 2 {
        return Err(Error::Test("AD test needs at least 2 observations".into()));
    }
    let xs = sorted(data);
    let n = xs.len();
    let mut ln_f = Vec::with_capacity(n);
    let mut ln_s = Vec::with_capacity(n);
    for (&x, &(f, s)) in xs.iter().zip(&model.cdf_sf_sorted(&xs)?) {
        if !(f > 0.0) || !(s > 0.0) {
            return Err(Error::Test(format!(
                "AD test: fitted cdf is numerically {} at observation {x}",
                if f > 0.0 { 1 } else { 0 }
            )));
        }
        ln_f.push(f.ln());
        ln_s.push(s.ln());
    }
    let sum: f64 = (0..n).map(|i| (2 * i + 1) as f64 * (ln_f[i] + ln_s[n - 1 - i])).sum();
    Ok(-(n as f64) - sum / n as f64)
}

/// Limiting distribution function of `A²` (Marsaglia & Marsaglia, 2004).
pub(crate) fn ad_limit_cdf(z: f64) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    if z < 2.0 {
        (-1.2337141 / z).exp() / z.sqrt()
            * (2.00012 + (0.247105 - (0.0649821 - (0.0347962 - (0.011672 - 0.00168691 * z) * z) * z) * z) * z)
    } else {
        (-(1.0776 - (2.30695 - (0.43424 - (0.082433 - (0.008056 - 0.0003146 * z) * z) * z) * z) * z).exp()).exp()
    }
}

/// Anderson-Darling statistic for `model` with a p-value per `method`. The
/// bootstrap refits `model`'s family on each resample and reports
/// `(1 + #{A²* ≥ A²}) / (B + 1)`; resamples that fail to fit are skipped.
pub fn ad_test(data: &[f64], model: &UnitModel, method: AdMethod) -> Result<TestResult> {
    let stat = ad_statistic(data, model)?;
    let pvalue = match method {
        AdMethod::Asymptotic => (1.0 - ad_limit_cdf(stat)).clamp(0.0, 1.0),
        AdMethod::Bootstrap { resamples, seed } => {
            if resamples == 0 {
                return Err(Error::domain("bootstrap needs at least one resample"));
            }
            let sampler = model.sampler()?;
            let family = model.family();
            let n = data.len();
            let stats: Vec<Option<f64>> = par_map(resamples, |b| {
                let mut rng = substream(seed, b as u64);
                let sample: Vec<f64> = (0..n).map(|_| sampler.sample(&mut rng)).collect();
                let refit = fit_mle(family, &sample).ok()?.model().ok()?;
                ad_statistic(&sample, &refit).ok()
            });
            let valid: Vec<f64> = stats.into_iter().flatten().collect();
            if valid.len() * 2 < resamples {
                return Err(Error::Test(format!(
                    "AD bootstrap: only {} of {resamples} resamples could be refitted",
                    valid.len()
                )));
            }
            let exceed = valid.iter().filter(|&&a| a >= stat).count();
            (1 + exceed) as f64 / (valid.len() + 1) as f64
        }
    };
    Ok(TestResult { stat, pvalue })
}

pub(crate) fn gof_report(data: &[f64], fit: &FitReport, method: AdMethod) -> Result<GofReport> {
    let model = fit.model()?;
    let ad = ad_test(data, &model, method)?;
    let ks = ks_test(data, &model)?;
    Ok(GofReport {
        ad_stat: ad.stat,
        ad_pvalue: ad.pvalue,
        ks_stat: ks.stat,
        ks_pvalue: ks.pvalue,
        ad_method: method,
    })
}
