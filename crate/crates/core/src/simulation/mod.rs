//! Monte-Carlo run-length estimation, control-limit calibration and the
//! cross-model robustness study.
//!
//! Replication `i` always draws from ChaCha8 substream `i` of the configured
//! seed, and run lengths are collected by index, so every result is a pure
//! function of the seed regardless of how many worker threads execute it.

pub mod cases;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::charts::{ewma_limits, ewma_update, Chart, EwmaChart};
use crate::error::{Error, Result};
use crate::models::{Sampler, UnitModel};

/// Simulation and calibration controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignConfig {
    pub arl0: f64,
    pub xi: f64,
    pub n_runs: usize,
    pub seed: u64,
    pub rl_cap: u64,
    pub l_grid: f64,
}

impl Default for DesignConfig {
    fn default() -> Self {
        DesignConfig {
            arl0: 370.4,
            xi: 4.0,
            n_runs: 10_000,
            seed: 0,
            rl_cap: 5_000_000,
            l_grid: 0.001,
        }
    }
}

impl DesignConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.arl0 > 1.0) || !self.arl0.is_finite() {
            return Err(Error::domain(format!("arl0 must exceed 1, got {}", self.arl0)));
        }
        if !(self.xi > 0.0) {
            return Err(Error::domain(format!("xi must be positive, got {}", self.xi)));
        }
        if self.n_runs == 0 {
            return Err(Error::domain("n_runs must be at least 1"));
        }
        if !((self.rl_cap as f64) > self.arl0 * 100.0) {
            return Err(Error::domain(format!(
                "rl_cap must exceed 100 * arl0 = {}, got {}",
                self.arl0 * 100.0,
                self.rl_cap
            )));
        }
        if !(self.l_grid > 0.0 && self.l_grid <= 0.1) {
            return Err(Error::domain(format!("l_grid must lie in (0, 0.1], got {}", self.l_grid)));
        }
        Ok(())
    }
}

/// Run-length distribution summary. Analytic summaries have `n_runs = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLengthSummary {
    pub arl: f64,
    pub sdrl: f64,
    pub mrl: f64,
    pub n_runs: usize,
    pub se_arl: f64,
    /// Replications stopped at `rl_cap`; when nonzero `arl` is a lower bound.
    pub censored: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Probability that one observation from `model` falls outside `[lcl, ucl]`.
pub fn p_out(model: &UnitModel, lcl: f64, ucl: f64) -> Result<f64> {
    if !(lcl < ucl) {
        return Err(Error::domain(format!("p_out: need lcl < ucl, got ({lcl}, {ucl})")));
    }
    let below = if lcl <= 0.0 { 0.0 } else { model.cdf(lcl)? };
    let above = if ucl >= 1.0 { 0.0 } else { model.sf(ucl)? };
    Ok(below + above)
}

/// Geometric run-length metrics for a point-exit probability `p`.
pub fn shewhart_rl_exact(p: f64) -> Result<RunLengthSummary> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::domain(format!("exit probability must lie in (0, 1], got {p}")));
    }
    let mrl = if p == 1.0 { 1.0 } else { (0.5f64.ln() / (-p).ln_1p()).ceil().max(1.0) };
    Ok(RunLengthSummary {
        arl: 1.0 / p,
        sdrl: (1.0 - p).sqrt() / p,
        mrl,
        n_runs: 0,
        se_arl: 0.0,
        censored: 0,
        warning: None,
    })
}

/// Generator for replication `index` of `seed`.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws from `sampler` until the chart signals. Returns the run length and
/// whether it was censored at `rl_cap`.
pub fn simulate_run_length<R: rand::Rng + ?Sized>(
    chart: &Chart,
    sampler: &Sampler,
    rng: &mut R,
    rl_cap: u64,
) -> (u64, bool) {
    let lambda = chart.lambda();
    let mut z = chart.center();
    for t in 1..=rl_cap {
        z = ewma_update(z, sampler.sample(rng), lambda);
        if chart.is_signal(z) {
            return (t, false);
        }
    }
    (rl_cap, true)
}

#[cfg(feature = "parallel")]
pub(crate) fn par_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
fn par_for_each<T, F>(items: &mut [T], f: F)
where
    T: Send,
    F: Fn(&mut T) + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter_mut().for_each(f);
}

#[cfg(not(feature = "parallel"))]
fn par_for_each<T, F>(items: &mut [T], f: F)
where
    F: Fn(&mut T),
{
    items.iter_mut().for_each(f);
}

/// Runs `f` on a dedicated pool of `threads` workers (0 = all cores).
/// Outputs do not depend on the worker count.
#[cfg(feature = "parallel")]
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::domain(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Runs `f` on the calling thread; built without the `parallel` feature.
#[cfg(not(feature = "parallel"))]
pub fn with_threads<T: Send>(_threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    Ok(f())
}

/// Run lengths of `n_runs` replications, in replication order.
pub fn run_lengths(chart: &Chart, model: &UnitModel, n_runs: usize, seed: u64, rl_cap: u64) -> Result<Vec<(u64, bool)>> {
    let sampler = model.sampler()?;
    Ok(par_map(n_runs, |i| {
        let mut rng = substream(seed, i as u64);
        simulate_run_length(chart, &sampler, &mut rng, rl_cap)
    }))
}

/// Mean, sample sd, median (central average for even n) and censoring count.
pub fn summarize(rls: &[(u64, bool)]) -> Result<RunLengthSummary> {
    let n = rls.len();
    if n == 0 {
        return Err(Error::Estimation("no replications to summarize".into()));
    }
    let censored = rls.iter().filter(|r| r.1).count();
    if 2 * censored > n {
        return Err(Error::Estimation(format!(
            "{censored} of {n} replications reached the run-length cap; raise rl_cap"
        )));
    }
    let mean = rls.iter().map(|r| r.0 as f64).sum::<f64>() / n as f64;
    let var = if n > 1 {
        rls.iter().map(|r| (r.0 as f64 - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    let mut sorted: Vec<u64> = rls.iter().map(|r| r.0).collect();
    sorted.sort_unstable();
    let mrl = if n % 2 == 1 {
        sorted[n / 2] as f64
    } else {
        0.5 * (sorted[n / 2 - 1] as f64 + sorted[n / 2] as f64)
    };
    let warning = (100 * censored > n).then(|| {
        format!("{censored} of {n} replications censored at the run-length cap; ARL is a lower bound")
    });
    Ok(RunLengthSummary {
        arl: mean,
        sdrl: var.sqrt(),
        mrl,
        n_runs: n,
        se_arl: var.sqrt() / (n as f64).sqrt(),
        censored,
        warning,
    })
}

/// Monte-Carlo run-length summary of `chart` when observations follow `model`.
pub fn estimate_rl(chart: &Chart, model: &UnitModel, config: &DesignConfig) -> Result<RunLengthSummary> {
    if config.n_runs == 0 {
        return Err(Error::domain("n_runs must be at least 1"));
    }
    summarize(&run_lengths(chart, model, config.n_runs, config.seed, config.rl_cap)?)
}

/// Outcome of [`calibrate_l`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    #[serde(rename = "L")]
    pub l: f64,
    pub chart: EwmaChart,
    pub achieved: RunLengthSummary,
    /// Distinct lattice points whose ARL was evaluated.
    pub evaluations: usize,
}

/// One replication whose EWMA path is simulated lazily. Only points where the
/// path sets a new running minimum or maximum are stored: a chart with limits
/// `[lcl, ucl] ∋ cl` first signals at the first such record outside them.
struct Replication {
    rng: ChaCha8Rng,
    t: u64,
    z: f64,
    lo: f64,
    hi: f64,
    records: Vec<(u64, f64)>,
}

impl Replication {
    fn first_exit(&self, lcl: f64, ucl: f64) -> Option<u64> {
        self.records.iter().find(|(_, z)| *z < lcl || *z > ucl).map(|r| r.0)
    }

    fn extend(&mut self, sampler: &Sampler, lambda: f64, lcl: f64, ucl: f64, cap: u64) {
        if self.first_exit(lcl, ucl).is_some() {
            return;
        }
        while self.t < cap {
            self.z = ewma_update(self.z, sampler.sample(&mut self.rng), lambda);
            self.t += 1;
            if self.z < self.lo {
                self.lo = self.z;
                self.records.push((self.t, self.z));
                if self.z < lcl {
                    return;
                }
            } else if self.z > self.hi {
                self.hi = self.z;
                self.records.push((self.t, self.z));
                if self.z > ucl {
                    return;
                }
            }
        }
    }

    fn run_length(&self, lcl: f64, ucl: f64) -> (u64, bool) {
        match self.first_exit(lcl, ucl) {
            Some(t) => (t, false),
            None => (self.t, true),
        }
    }
}

/// Finds the smallest `L` on the `l_grid` lattice whose in-control ARL lies in
/// `(arl0 − ξ, arl0 + ξ)`.
///
/// All candidates share the same random numbers (replication `i` uses
/// substream `i` for every `L`), so each replication's run length is
/// nondecreasing in `L`. The search steps up a coarse grid until the ARL
/// exceeds `arl0 − ξ`, then bisects the lattice inside the last coarse step.
/// Results are identical to evaluating each lattice point with
/// [`estimate_rl`] at the same seed.
pub fn calibrate_l(model: &UnitModel, lambda: f64, config: &DesignConfig) -> Result<Calibration> {
    config.validate()?;
    const L_MAX: f64 = 6.0;
    let sampler = model.sampler()?;
    let cl = model.mean();
    let mut reps: Vec<Replication> = (0..config.n_runs)
        .map(|i| Replication {
            rng: substream(config.seed, i as u64),
            t: 0,
            z: cl,
            lo: cl,
            hi: cl,
            records: Vec::new(),
        })
        .collect();
    let mut evaluations = 0usize;
    let mut evaluate = |k: u64, reps: &mut Vec<Replication>| -> Result<(EwmaChart, RunLengthSummary)> {
        evaluations += 1;
        let chart = ewma_limits(model, lambda, k as f64 * config.l_grid)?;
        par_for_each(reps, |r| r.extend(&sampler, lambda, chart.lcl, chart.ucl, config.rl_cap));
        let rls: Vec<(u64, bool)> = reps.iter().map(|r| r.run_length(chart.lcl, chart.ucl)).collect();
        Ok((chart, summarize(&rls)?))
    };

    let floor = config.arl0 - config.xi;
    let step = ((0.05 / config.l_grid).round() as u64).max(1);
    let k_max = (L_MAX / config.l_grid).floor() as u64;
    let mut lo = 0u64;
    let mut hi = None;
    let mut k = step;
    while k <= k_max {
        let (chart, summary) = evaluate(k, &mut reps)?;
        if summary.arl > floor {
            hi = Some((k, chart, summary));
            break;
        }
        lo = k;
        k += step;
    }
    let Some((mut hi_k, mut best_chart, mut best)) = hi else {
        return Err(Error::Design(format!(
            "in-control ARL stays below {floor} for every L up to {L_MAX}"
        )));
    };
    while hi_k - lo > 1 {
        let mid = lo + (hi_k - lo) / 2;
        let (chart, summary) = evaluate(mid, &mut reps)?;
        if summary.arl > floor {
            hi_k = mid;
            best_chart = chart;
            best = summary;
        } else {
            lo = mid;
        }
    }
    if best.arl >= config.arl0 + config.xi {
        return Err(Error::Design(format!(
            "no L on the {} lattice gives an ARL within {} of {}: ARL jumps to {:.3} at L = {:.3}",
            config.l_grid,
            config.xi,
            config.arl0,
            best.arl,
            best_chart.l
        )));
    }
    Ok(Calibration {
        l: best_chart.l,
        chart: best_chart,
        achieved: best,
        evaluations,
    })
}

/// Mean shifts applied to an in-control mean, dispersion held fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftProfile {
    pub mu0: f64,
    pub deltas: Vec<f64>,
}

impl ShiftProfile {
    pub fn new(mu0: f64, deltas: Vec<f64>) -> Result<Self> {
        for d in &deltas {
            let m = mu0 + d;
            if !(m > 0.0 && m < 1.0) {
                return Err(Error::domain(format!("shifted mean {m} (delta {d}) is outside (0, 1)")));
            }
        }
        Ok(ShiftProfile { mu0, deltas })
    }

    /// `delta ∈ {0, ±0.02, ±0.04, ±0.06, ±0.08}`, ordered by `mu1`.
    pub fn standard(mu0: f64) -> Result<Self> {
        let deltas = vec![-0.08, -0.06, -0.04, -0.02, 0.0, 0.02, 0.04, 0.06, 0.08];
        Self::new(mu0, deltas)
    }

    pub fn means(&self) -> Vec<f64> {
        // Rounded so that e.g. 0.2 − 0.08 reads back as 0.12.
        self.deltas.iter().map(|d| ((self.mu0 + d) * 1e12).round() / 1e12).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftPoint {
    pub mu1: f64,
    pub summary: RunLengthSummary,
}

/// Run-length summary at each shifted mean, dispersion fixed at `ic_model`'s.
pub fn ooc_profile(
    chart: &Chart,
    ic_model: &UnitModel,
    profile: &ShiftProfile,
    config: &DesignConfig,
) -> Result<Vec<ShiftPoint>> {
    profile
        .means()
        .into_iter()
        .map(|mu1| {
            let model = ic_model.with_mean(mu1)?;
            Ok(ShiftPoint {
                mu1,
                summary: estimate_rl(chart, &model, config)?,
            })
        })
        .collect()
}

/// Exact Shewhart counterpart of [`ooc_profile`].
pub fn shewhart_profile(lcl: f64, ucl: f64, ic_model: &UnitModel, profile: &ShiftProfile) -> Result<Vec<ShiftPoint>> {
    profile
        .means()
        .into_iter()
        .map(|mu1| {
            let model = ic_model.with_mean(mu1)?;
            Ok(ShiftPoint {
                mu1,
                summary: shewhart_rl_exact(p_out(&model, lcl, ucl)?)?,
            })
        })
        .collect()
}

/// Observations from `true_model`, limits from `limits_model`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessCell {
    pub true_model: UnitModel,
    pub limits_model: UnitModel,
    pub lambda: f64,
    #[serde(rename = "L")]
    pub l: f64,
    /// In-control summary (`mu1 = mu0`).
    pub summary: RunLengthSummary,
    pub profile: Vec<ShiftPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessStudy {
    pub lambda: f64,
    pub calibrations: Vec<Calibration>,
    /// Row-major: `cells[3 * t + l]` has true model `t` and limits model `l`.
    pub cells: Vec<RobustnessCell>,
}

/// Calibrates each model's chart, then runs every chart against every model
/// across `profile`.
pub fn robustness_matrix(
    case_models: &[UnitModel; 3],
    lambda: f64,
    profile: &ShiftProfile,
    config: &DesignConfig,
) -> Result<RobustnessStudy> {
    let mu0 = case_models[0].mu();
    if case_models.iter().any(|m| (m.mu() - mu0).abs() > 1e-12) {
        return Err(Error::domain("robustness study: models must share the in-control mean"));
    }
    if (profile.mu0 - mu0).abs() > 1e-12 {
        return Err(Error::domain("robustness study: shift profile is centred on a different mean"));
    }
    let calibrations = case_models
        .iter()
        .map(|m| calibrate_l(m, lambda, config))
        .collect::<Result<Vec<_>>>()?;
    robustness_with_limits(case_models, &calibrations, profile, config).map(|cells| RobustnessStudy {
        lambda,
        calibrations,
        cells,
    })
}

/// Robustness grid for already-calibrated charts.
pub fn robustness_with_limits(
    case_models: &[UnitModel; 3],
    calibrations: &[Calibration],
    profile: &ShiftProfile,
    config: &DesignConfig,
) -> Result<Vec<RobustnessCell>> {
    let mut cells = Vec::with_capacity(9);
    for true_model in case_models {
        for (limits_model, cal) in case_models.iter().zip(calibrations) {
            let chart = Chart::Ewma(cal.chart);
            let points = ooc_profile(&chart, true_model, profile, config)?;
            let summary = match points.iter().find(|p| (p.mu1 - true_model.mu()).abs() < 1e-12) {
                Some(p) => p.summary.clone(),
                None => estimate_rl(&chart, true_model, config)?,
            };
            cells.push(RobustnessCell {
                true_model: *true_model,
                limits_model: *limits_model,
                lambda: cal.chart.lambda,
                l: cal.l,
                summary,
                profile: points,
            });
        }
    }
    Ok(cells)
}
