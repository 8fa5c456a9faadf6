//! Two-sided Shewhart and EWMA charts for individual observations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{check_data, UnitModel};

/// Equal-tail probability limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShewhartChart {
    pub lcl: f64,
    pub ucl: f64,
    pub cl: f64,
    pub alpha: f64,
}

/// Steady-state EWMA limits `cl ± L·σ₀,X·√(λ / (2 − λ))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EwmaChart {
    pub lambda: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub lcl: f64,
    pub ucl: f64,
    pub cl: f64,
    pub sigma0x: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Chart {
    Shewhart(ShewhartChart),
    Ewma(EwmaChart),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorResult {
    pub statistic_path: Vec<f64>,
    /// First violation, 1-based.
    pub signal_index: Option<usize>,
    pub signaled: bool,
}

pub fn shewhart_limits(model: &UnitModel, alpha: f64) -> Result<ShewhartChart> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(ShewhartChart {
        lcl: model.quantile(alpha / 2.0)?,
        ucl: model.quantile(1.0 - alpha / 2.0)?,
        cl: model.mean(),
        alpha,
    })
}

pub fn ewma_limits(model: &UnitModel, lambda: f64, l: f64) -> Result<EwmaChart> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::domain(format!("lambda must lie in (0, 1], got {lambda}")));
    }
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::domain(format!("L must be positive, got {l}")));
    }
    let cl = model.mean();
    let sigma0x = model.std_dev();
    let half = l * sigma0x * (lambda / (2.0 - lambda)).sqrt();
    Ok(EwmaChart {
        lambda,
        l,
        lcl: cl - half,
        ucl: cl + half,
        cl,
        sigma0x,
    })
}

#[inline]
pub fn ewma_update(z_prev: f64, x: f64, lambda: f64) -> f64 {
    if lambda == 1.0 {
        x
    } else {
        z_prev + lambda * (x - z_prev)
    }
}

impl Chart {
    pub fn limits(&self) -> (f64, f64) {
        match self {
            Chart::Shewhart(c) => (c.lcl, c.ucl),
            Chart::Ewma(c) => (c.lcl, c.ucl),
        }
    }

    pub fn center(&self) -> f64 {
        match self {
            Chart::Shewhart(c) => c.cl,
            Chart::Ewma(c) => c.cl,
        }
    }

    /// Smoothing weight; a Shewhart chart behaves as `λ = 1`.
    pub fn lambda(&self) -> f64 {
        match self {
            Chart::Shewhart(_) => 1.0,
            Chart::Ewma(c) => c.lambda,
        }
    }

    /// `true` when `stat` lies outside the closed interval `[lcl, ucl]`.
    #[inline]
    pub fn is_signal(&self, stat: f64) -> bool {
        let (lo, hi) = self.limits();
        stat < lo || stat > hi
    }

    /// Runs the chart over `series`. With `early_exit` the path stops at the
    /// first signal; otherwise the whole path is returned.
    pub fn monitor(&self, series: &[f64], early_exit: bool) -> Result<MonitorResult> {
        if series.is_empty() {
            return Err(Error::domain("monitor: empty series"));
        }
        check_data(series)?;
        let lambda = self.lambda();
        let mut z = self.center();
        let mut path = Vec::with_capacity(series.len());
        let mut signal_index = None;
        for (i, &x) in series.iter().enumerate() {
            z = ewma_update(z, x, lambda);
            path.push(z);
            if signal_index.is_none() && self.is_signal(z) {
                signal_index = Some(i + 1);
                if early_exit {
                    break;
                }
            }
        }
        Ok(MonitorResult {
            statistic_path: path,
            signal_index,
            signaled: signal_index.is_some(),
        })
    }
}

impl From<ShewhartChart> for Chart {
    fn from(c: ShewhartChart) -> Self {
        Chart::Shewhart(c)
    }
}

impl From<EwmaChart> for Chart {
    fn from(c: EwmaChart) -> Self {
        Chart::Ewma(c)
    }
}

pub fn monitor(chart: &Chart, series: &[f64]) -> Result<MonitorResult> {
    chart.monitor(series, false)
}
