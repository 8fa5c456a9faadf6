//! Browser bindings: density curves, monitoring a pasted series, and a Monte
//! Carlo ARL estimate. Every export returns a JSON string.

use serde::Serialize;
use serde_json::{json, Value};
use unitchart::charts::{ewma_limits, shewhart_limits, Chart};
use unitchart::models::{Family, UnitModel};
use unitchart::simulation::{estimate_rl, DesignConfig};
use unitchart::{Error, Result};
use wasm_bindgen::prelude::*;

fn js(r: Result<Value>) -> std::result::Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e.to_string()))
}

fn model(family: &str, mu: f64, dispersion: f64) -> Result<UnitModel> {
    UnitModel::new(family.parse()?, mu, dispersion)
}

#[derive(Serialize)]
struct Curve {
    model: UnitModel,
    sd: f64,
    y: Vec<f64>,
}

/// Densities of the three families on a shared grid over (0, 1).
pub fn density_curves_value(mu: f64, phi: f64, sigma: f64, tau: f64, points: usize) -> Result<Value> {
    if !(2..=4000).contains(&points) {
        return Err(Error::Domain(format!("points must lie in [2, 4000], got {points}")));
    }
    let x: Vec<f64> = (1..=points).map(|i| i as f64 / (points + 1) as f64).collect();
    let curves = [(Family::Beta, phi), (Family::Simplex, sigma), (Family::UnitGamma, tau)]
        .into_iter()
        .map(|(family, d)| {
            let m = UnitModel::new(family, mu, d)?;
            let y = x.iter().map(|&t| m.pdf(t)).collect::<Result<Vec<_>>>()?;
            Ok(Curve { model: m, sd: m.std_dev(), y })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({ "x": x, "curves": curves }))
}

fn parse_series(text: &str) -> Result<Vec<f64>> {
    text.split(|c: char| c.is_whitespace() || c == ',' || c == ';')
        .filter(|s| !s.is_empty())
        .enumerate()
        .map(|(i, s)| {
            s.parse::<f64>()
                .map_err(|_| Error::Domain(format!("entry {} ('{s}') is not a number", i + 1)))
        })
        .collect()
}

/// Shewhart and EWMA statistics for a whitespace- or comma-separated series.
pub fn monitor_series_value(
    family: &str,
    mu: f64,
    dispersion: f64,
    lambda: f64,
    l: f64,
    alpha: f64,
    series: &str,
) -> Result<Value> {
    let m = model(family, mu, dispersion)?;
    let data = parse_series(series)?;
    let charts = [
        ("shewhart", Chart::Shewhart(shewhart_limits(&m, alpha)?)),
        ("ewma", Chart::Ewma(ewma_limits(&m, lambda, l)?)),
    ];
    let mut out = serde_json::Map::new();
    for (name, chart) in charts {
        let r = chart.monitor(&data, false)?;
        let (lcl, ucl) = chart.limits();
        out.insert(
            name.into(),
            json!({
                "lcl": lcl,
                "ucl": ucl,
                "cl": chart.center(),
                "path": r.statistic_path,
                "signal_index": r.signal_index,
            }),
        );
    }
    Ok(Value::Object(out))
}

/// Run-length summary of an EWMA chart designed at `mu` when the mean is `mu1`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_arl_value(
    family: &str,
    mu: f64,
    dispersion: f64,
    lambda: f64,
    l: f64,
    mu1: f64,
    runs: usize,
    seed: u64,
) -> Result<Value> {
    if runs > 50_000 {
        return Err(Error::Domain(format!("at most 50000 runs in the browser, got {runs}")));
    }
    let m = model(family, mu, dispersion)?;
    let chart = Chart::Ewma(ewma_limits(&m, lambda, l)?);
    let config = DesignConfig { n_runs: runs, seed, ..DesignConfig::default() };
    let summary = estimate_rl(&chart, &m.with_mean(mu1)?, &config)?;
    Ok(json!({ "chart": chart, "mu1": mu1, "summary": summary }))
}

#[wasm_bindgen]
pub fn density_curves(mu: f64, phi: f64, sigma: f64, tau: f64, points: usize) -> std::result::Result<String, JsError> {
    js(density_curves_value(mu, phi, sigma, tau, points))
}

#[wasm_bindgen]
pub fn monitor_series(
    family: &str,
    mu: f64,
    dispersion: f64,
    lambda: f64,
    l: f64,
    alpha: f64,
    series: &str,
) -> std::result::Result<String, JsError> {
    js(monitor_series_value(family, mu, dispersion, lambda, l, alpha, series))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn estimate_arl(
    family: &str,
    mu: f64,
    dispersion: f64,
    lambda: f64,
    l: f64,
    mu1: f64,
    runs: usize,
    seed: u64,
) -> std::result::Result<String, JsError> {
    js(estimate_arl_value(family, mu, dispersion, lambda, l, mu1, runs, seed))
}
