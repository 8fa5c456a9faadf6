use serde::Serialize;
use unitchart::charts::{ewma_limits, shewhart_limits, Chart, EwmaChart, MonitorResult, ShewhartChart};
use unitchart::inference::{fit_mle, phase1_analysis, select_model, AdMethod, FitReport, Phase1Options, RunsMethod};
use unitchart::models::{Family, UnitModel};
use unitchart::simulation::cases::{case_models, MU0};
use unitchart::simulation::{
    calibrate_l, ooc_profile, robustness_matrix, shewhart_profile, Calibration, DesignConfig, RobustnessStudy,
    RunLengthSummary, ShiftProfile,
};

use crate::args::{AdArg, ChartKind, DesignArgs, EvaluateArgs, FitArgs, MonitorArgs, RobustnessArgs, RunsArg};
use crate::error::CliError;
use crate::input::DataFile;
use crate::plot::ChartPlotData;
use crate::report::{f, Outcome, TextTable};

pub fn fit(args: &FitArgs, data: &DataFile) -> Result<Outcome, CliError> {
    let options = Phase1Options {
        ad_method: match args.ad {
            AdArg::Bootstrap => AdMethod::Bootstrap { resamples: args.resamples, seed: args.seed },
            AdArg::Asymptotic => AdMethod::Asymptotic,
        },
        runs_method: match args.runs_test {
            RunsArg::Normal => RunsMethod::Normal,
            RunsArg::Exact => RunsMethod::Exact,
        },
    };
    let report = phase1_analysis(&data.values, &options)?;
    let mut t = TextTable::new(["family", "mu", "se", "dispersion", "se", "loglik", "AIC", "BIC", "AD", "p", "KS", "p"]);
    for a in &report.families {
        let (fit, g) = (&a.fit, &a.gof);
        t.row([
            fit.family.to_string(),
            f(fit.estimates[0], 5),
            f(fit.std_errors[0], 5),
            format!("{}={}", fit.family.dispersion_name(), f(fit.estimates[1], 4)),
            f(fit.std_errors[1], 4),
            f(fit.loglik, 3),
            f(fit.aic, 3),
            f(fit.bic, 3),
            f(g.ad_stat, 4),
            f(g.ad_pvalue, 4),
            f(g.ks_stat, 4),
            f(g.ks_pvalue, 4),
        ]);
    }
    let r = &report.runs;
    let table = format!(
        "n = {}; runs test: {} runs ({} above, {} below median {}), p = {}\n\n{}best: {}\n",
        report.n,
        r.n_runs_observed,
        r.n_above,
        r.n_below,
        f(r.median, 4),
        f(r.pvalue, 4),
        t.render(),
        report.best().fit.family
    );
    Ok(Outcome::new(&report, table))
}

#[derive(Debug, Serialize)]
struct DesignResult {
    model: UnitModel,
    designs: Vec<Calibration>,
}

pub fn design(args: &DesignArgs) -> Result<Outcome, CliError> {
    let model = args.model.model()?;
    let config = args.sim.config()?;
    let designs = args
        .lambdas
        .iter()
        .map(|&lambda| calibrate_l(&model, lambda, &config))
        .collect::<Result<Vec<_>, _>>()?;
    let mut t = TextTable::new(["lambda", "L", "LCL", "UCL", "ARL0", "se", "SDRL", "MRL"]);
    for c in &designs {
        let a = &c.achieved;
        t.row([
            f(c.chart.lambda, 2),
            f(c.l, 3),
            f(c.chart.lcl, 4),
            f(c.chart.ucl, 4),
            f(a.arl, 2),
            f(a.se_arl, 2),
            f(a.sdrl, 2),
            f(a.mrl, 1),
        ]);
    }
    let table = format!("{model}\n{}", t.render());
    Ok(Outcome::new(&DesignResult { model, designs }, table))
}

#[derive(Debug, Serialize)]
struct EvaluateRow {
    mu1: f64,
    #[serde(flatten)]
    summary: RunLengthSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    shewhart: Option<RunLengthSummary>,
}

#[derive(Debug, Serialize)]
struct EvaluateResult {
    model: UnitModel,
    chart: Chart,
    #[serde(skip_serializing_if = "Option::is_none")]
    calibration: Option<Calibration>,
    rows: Vec<EvaluateRow>,
}

fn profile_for(model: &UnitModel, deltas: &[f64]) -> Result<ShiftProfile, CliError> {
    Ok(if deltas.is_empty() {
        ShiftProfile::standard(model.mu())?
    } else {
        ShiftProfile::new(model.mu(), deltas.to_vec())?
    })
}

pub fn evaluate(args: &EvaluateArgs) -> Result<Outcome, CliError> {
    let model = args.model.model()?;
    let profile = profile_for(&model, &args.deltas)?;
    let sh = shewhart_limits(&model, args.alpha)?;
    let exact = shewhart_profile(sh.lcl, sh.ucl, &model, &profile)?;
    let (chart, calibration, rows) = match args.chart {
        ChartKind::Shewhart => {
            if args.lambda.is_some() || args.l.is_some() {
                return Err(CliError::Usage("--lambda and --L apply to EWMA charts only".into()));
            }
            let rows = exact.into_iter().map(|p| EvaluateRow { mu1: p.mu1, summary: p.summary, shewhart: None });
            (Chart::Shewhart(sh), None, rows.collect::<Vec<_>>())
        }
        ChartKind::Ewma => {
            let lambda = args.lambda.ok_or_else(|| CliError::Usage("EWMA evaluation needs --lambda".into()))?;
            let config = args.sim.config()?;
            let (chart, calibration) = match args.l {
                Some(l) => (ewma_limits(&model, lambda, l)?, None),
                None => {
                    let c = calibrate_l(&model, lambda, &config)?;
                    (c.chart, Some(c))
                }
            };
            let chart = Chart::Ewma(chart);
            let points = ooc_profile(&chart, &model, &profile, &config)?;
            let rows = points
                .into_iter()
                .zip(exact)
                .map(|(p, e)| EvaluateRow {
                    mu1: p.mu1,
                    summary: p.summary,
                    shewhart: args.with_shewhart.then_some(e.summary),
                })
                .collect();
            (chart, calibration, rows)
        }
    };

    let mut header = vec!["mu1", "ARL", "se", "SDRL", "MRL", "censored"];
    if args.with_shewhart {
        header.extend(["SH ARL", "SH SDRL", "SH MRL"]);
    }
    let mut t = TextTable::new(header);
    let mut warnings = Vec::new();
    for r in &rows {
        let s = &r.summary;
        let mut cells = vec![f(r.mu1, 2), f(s.arl, 2), f(s.se_arl, 2), f(s.sdrl, 2), f(s.mrl, 1), s.censored.to_string()];
        if let Some(e) = &r.shewhart {
            cells.extend([f(e.arl, 2), f(e.sdrl, 2), f(e.mrl, 0)]);
        }
        t.row(cells);
        if let Some(w) = &s.warning {
            warnings.push(format!("mu1 = {}: {w}", r.mu1));
        }
    }
    let (lcl, ucl) = chart.limits();
    let table = format!("{model}; limits ({}, {})\n{}", f(lcl, 4), f(ucl, 4), t.render());
    let mut out = Outcome::new(&EvaluateResult { model, chart, calibration, rows }, table);
    out.warnings = warnings;
    Ok(out)
}

pub fn robustness(args: &RobustnessArgs) -> Result<Outcome, CliError> {
    let config = args.sim.config()?;
    let models = case_models(args.case as usize)?;
    let profile = ShiftProfile::standard(MU0)?;
    let studies = args
        .lambdas
        .iter()
        .map(|&lambda| robustness_matrix(&models, lambda, &profile, &config))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = String::new();
    for study in &studies {
        table.push_str(&render_study(study));
    }
    Ok(Outcome::new(&studies, table))
}

fn render_study(study: &RobustnessStudy) -> String {
    let mut out = String::new();
    for true_cells in study.cells.chunks(3) {
        let true_model = true_cells[0].true_model;
        out.push_str(&format!("lambda = {}, true model {true_model}\n", study.lambda));
        let mut header = vec!["mu1".to_owned()];
        for c in true_cells {
            let fam = c.limits_model.family();
            header.extend([format!("{fam} ARL"), "SDRL".into(), "MRL".into()]);
        }
        let mut t = TextTable::new(header);
        for i in 0..true_cells[0].profile.len() {
            let mut row = vec![f(true_cells[0].profile[i].mu1, 2)];
            for c in true_cells {
                let s = &c.profile[i].summary;
                row.extend([f(s.arl, 2), f(s.sdrl, 2), f(s.mrl, 1)]);
            }
            t.row(row);
        }
        let mut lcl = vec!["LCL".to_owned()];
        let mut ucl = vec!["UCL".to_owned()];
        for cal in &study.calibrations {
            lcl.extend([String::new(), String::new(), f(cal.chart.lcl, 4)]);
            ucl.extend([String::new(), String::new(), f(cal.chart.ucl, 4)]);
        }
        t.row(lcl);
        t.row(ucl);
        out.push_str(&t.render());
        out.push('\n');
    }
    out
}

#[derive(Debug, Serialize)]
struct ChartRun {
    name: String,
    chart: Chart,
    #[serde(skip_serializing_if = "Option::is_none")]
    calibration: Option<Calibration>,
    phase1_signal: Option<usize>,
    phase2: MonitorResult,
    plot: ChartPlotData,
}

#[derive(Debug, Serialize)]
struct MonitorReport {
    fits: Vec<FitReport>,
    model: UnitModel,
    phase1_shewhart: MonitorResult,
    charts: Vec<ChartRun>,
}

pub fn monitor(args: &MonitorArgs, phase1: &DataFile, phase2: &DataFile) -> Result<(Outcome, Vec<(String, String)>), CliError> {
    let config = args.sim.config()?;
    let fits = select_model(&Family::ALL.iter().map(|&fam| fit_mle(fam, &phase1.values)).collect::<Result<Vec<_>, _>>()?);
    let chosen = match args.family {
        Some(fam) => fits.iter().find(|r| r.family == Family::from(fam)).expect("all families fitted"),
        None => &fits[0],
    };
    let model = chosen.model()?;
    let sh = shewhart_limits(&model, args.alpha)?;
    let phase1_shewhart = Chart::Shewhart(sh).monitor(&phase1.values, false)?;
    let mut warnings = Vec::new();
    if let Some(i) = phase1_shewhart.signal_index {
        let msg = format!("Phase I observation {i} lies outside the Shewhart limits ({:.4}, {:.4})", sh.lcl, sh.ucl);
        if !args.force {
            return Err(CliError::Refused(format!("{msg}; rerun with --force to monitor anyway")));
        }
        warnings.push(msg);
    }

    let first = phase1.values.len() + 1;
    let mut charts = vec![chart_run("shewhart".into(), Chart::Shewhart(sh), None, phase1, phase2, first)?];
    for &lambda in &args.lambdas {
        let cal = calibrate_l(&model, lambda, &config)?;
        let name = format!("ewma_{lambda}");
        charts.push(chart_run(name, Chart::Ewma(cal.chart), Some(cal), phase1, phase2, first)?);
    }

    let mut t = TextTable::new(["chart", "L", "LCL", "UCL", "Phase I signal", "Phase II signal"]);
    for c in &charts {
        let (lcl, ucl) = c.chart.limits();
        let show = |s: Option<usize>| s.map_or("none".to_owned(), |i| i.to_string());
        t.row([
            c.name.clone(),
            c.calibration.as_ref().map_or("-".into(), |k| f(k.l, 3)),
            f(lcl, 4),
            f(ucl, 4),
            show(c.phase1_signal),
            show(c.phase2.signal_index),
        ]);
    }
    let table = format!("model {model} (of {} candidates)\nPhase II signal indices count from 1 within Phase II\n{}", fits.len(), t.render());
    let plots = charts.iter().map(|c| (format!("{}.svg", c.name), c.plot.to_svg())).collect();
    let mut out = Outcome::new(&MonitorReport { fits, model, phase1_shewhart, charts }, table);
    out.warnings = warnings;
    Ok((out, plots))
}

fn chart_run(
    name: String,
    chart: Chart,
    calibration: Option<Calibration>,
    phase1: &DataFile,
    phase2: &DataFile,
    first: usize,
) -> Result<ChartRun, CliError> {
    let phase1_signal = chart.monitor(&phase1.values, false)?.signal_index;
    let phase2 = chart.monitor(&phase2.values, false)?;
    let title = match &chart {
        Chart::Shewhart(ShewhartChart { alpha, .. }) => format!("Phase II Shewhart chart (alpha = {alpha})"),
        Chart::Ewma(EwmaChart { lambda, l, .. }) => format!("Phase II EWMA chart (lambda = {lambda}, L = {l:.3})"),
    };
    let plot = ChartPlotData::new(title, &chart, &phase2, first);
    Ok(ChartRun { name, chart, calibration, phase1_signal, phase2, plot })
}

/// Shared by `tables`: a design config at the given seed and run count.
pub fn table_config(runs: usize, seed: u64) -> Result<DesignConfig, CliError> {
    let c = DesignConfig { n_runs: runs, seed, ..DesignConfig::default() };
    c.validate()?;
    Ok(c)
}
