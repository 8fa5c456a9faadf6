//! Regeneration of the reference tables.
//!
//! Ids: `3` moments, `4`/`5`/`6` Shewhart and EWMA ARLs (Beta, Simplex,
//! Unit Gamma), `7`..`15` robustness blocks (true family major, lambda minor),
//! `A.1` calibrated L values.

use serde::Serialize;
use unitchart::charts::{shewhart_limits, Chart};
use unitchart::models::{Family, MomentReport, UnitModel};
use unitchart::simulation::cases::{case_models, LAMBDAS, MU0};
use unitchart::simulation::{calibrate_l, ooc_profile, shewhart_profile, Calibration, DesignConfig, ShiftPoint, ShiftProfile};

use crate::commands::table_config;
use crate::error::CliError;
use crate::report::{f, Outcome, TextTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "table", rename_all = "lowercase")]
pub enum TableId {
    Moments,
    Performance { family: Family },
    Robustness { true_family: Family, lambda_index: usize },
    LValues,
}

impl TableId {
    pub fn parse(id: &str) -> Result<Self, CliError> {
        let id = id.trim();
        if id.eq_ignore_ascii_case("A.1") || id.eq_ignore_ascii_case("A1") {
            return Ok(TableId::LValues);
        }
        match id.parse::<usize>() {
            Ok(3) => Ok(TableId::Moments),
            Ok(n @ 4..=6) => Ok(TableId::Performance { family: Family::ALL[n - 4] }),
            Ok(n @ 7..=15) => Ok(TableId::Robustness { true_family: Family::ALL[(n - 7) / 3], lambda_index: (n - 7) % 3 }),
            _ => Err(CliError::Usage(format!("unknown table id '{id}' (expected 3, 4-15 or A.1)"))),
        }
    }

    pub fn needs_seed(self) -> bool {
        self != TableId::Moments
    }
}

pub fn run(id: TableId, runs: usize, seed: Option<u64>) -> Result<Outcome, CliError> {
    let config = || -> Result<DesignConfig, CliError> {
        let seed = seed.ok_or_else(|| CliError::Usage("this table is simulated; pass --seed".into()))?;
        table_config(runs, seed)
    };
    match id {
        TableId::Moments => moments(),
        TableId::Performance { family } => performance(family, &config()?),
        TableId::Robustness { true_family, lambda_index } => robustness(true_family, LAMBDAS[lambda_index], &config()?),
        TableId::LValues => l_values(&config()?),
    }
}

#[derive(Debug, Serialize)]
struct MomentRow {
    case: usize,
    model: UnitModel,
    moments: MomentReport,
}

fn moments() -> Result<Outcome, CliError> {
    let mut rows = Vec::new();
    let mut t = TextTable::new(["case", "model", "sd", "CV", "skew", "kurt"]);
    for case in 1..=4 {
        for model in case_models(case)? {
            let m = model.moment_report()?;
            t.row([
                case.to_string(),
                model.to_string(),
                f(m.std_dev, 8),
                f(m.cv, 7),
                f(m.skewness, 4),
                f(m.ex_kurtosis_plus3, 4),
            ]);
            rows.push(MomentRow { case, model, moments: m });
        }
    }
    Ok(Outcome::new(&rows, t.render()))
}

#[derive(Debug, Serialize)]
struct PerformanceBlock {
    case: usize,
    model: UnitModel,
    shewhart: Vec<ShiftPoint>,
    shewhart_limits: (f64, f64),
    ewma: Vec<EwmaColumn>,
}

#[derive(Debug, Serialize)]
struct EwmaColumn {
    calibration: Calibration,
    profile: Vec<ShiftPoint>,
}

fn performance(family: Family, config: &DesignConfig) -> Result<Outcome, CliError> {
    let profile = ShiftProfile::standard(MU0)?;
    let mut blocks = Vec::new();
    let mut text = String::new();
    for case in 1..=4 {
        let model = case_models(case)?[family as usize];
        let sh = shewhart_limits(&model, 0.0027)?;
        let shewhart = shewhart_profile(sh.lcl, sh.ucl, &model, &profile)?;
        let ewma = LAMBDAS
            .iter()
            .map(|&lambda| {
                let calibration = calibrate_l(&model, lambda, config)?;
                let profile = ooc_profile(&Chart::Ewma(calibration.chart), &model, &profile, config)?;
                Ok(EwmaColumn { calibration, profile })
            })
            .collect::<Result<Vec<_>, CliError>>()?;

        let mut header = vec!["mu1".to_owned(), "SH".to_owned()];
        for c in &ewma {
            header.extend([format!("l={}", c.calibration.chart.lambda), "se".into()]);
        }
        let mut t = TextTable::new(header);
        for (i, p) in shewhart.iter().enumerate() {
            let mut row = vec![f(p.mu1, 2), f(p.summary.arl, 2)];
            for c in &ewma {
                let s = &c.profile[i].summary;
                row.extend([f(s.arl, 2), f(s.se_arl, 2)]);
            }
            t.row(row);
        }
        for (name, sh_value, pick) in [("UCL", sh.ucl, true), ("LCL", sh.lcl, false)] {
            let mut row = vec![name.to_owned(), f(sh_value, 4)];
            for c in &ewma {
                let k = c.calibration.chart;
                row.extend([f(if pick { k.ucl } else { k.lcl }, 4), String::new()]);
            }
            t.row(row);
        }
        text.push_str(&format!("{model}\n{}\n", t.render()));
        blocks.push(PerformanceBlock { case, model, shewhart, shewhart_limits: (sh.lcl, sh.ucl), ewma });
    }
    Ok(Outcome::new(&blocks, text))
}

#[derive(Debug, Serialize)]
struct RobustnessBlock {
    case: usize,
    true_model: UnitModel,
    columns: Vec<RobustnessColumn>,
}

#[derive(Debug, Serialize)]
struct RobustnessColumn {
    limits_model: UnitModel,
    calibration: Calibration,
    profile: Vec<ShiftPoint>,
}

fn robustness(true_family: Family, lambda: f64, config: &DesignConfig) -> Result<Outcome, CliError> {
    let profile = ShiftProfile::standard(MU0)?;
    let mut blocks = Vec::new();
    let mut text = String::new();
    for case in 1..=4 {
        let models = case_models(case)?;
        let true_model = models[true_family as usize];
        let columns = models
            .iter()
            .map(|limits_model| {
                let calibration = calibrate_l(limits_model, lambda, config)?;
                let profile = ooc_profile(&Chart::Ewma(calibration.chart), &true_model, &profile, config)?;
                Ok(RobustnessColumn { limits_model: *limits_model, calibration, profile })
            })
            .collect::<Result<Vec<_>, CliError>>()?;

        let mut header = vec!["mu1".to_owned()];
        for c in &columns {
            let fam = c.limits_model.family();
            let tag = if fam == true_family { " (true)" } else { "" };
            header.extend([format!("{fam}{tag} ARL"), "SDRL".into(), "MRL".into(), "se".into()]);
        }
        let mut t = TextTable::new(header);
        for i in 0..profile.deltas.len() {
            let mut row = vec![f(columns[0].profile[i].mu1, 2)];
            for c in &columns {
                let s = &c.profile[i].summary;
                row.extend([f(s.arl, 2), f(s.sdrl, 2), f(s.mrl, 1), f(s.se_arl, 2)]);
            }
            t.row(row);
        }
        for (name, upper) in [("LCL", false), ("UCL", true)] {
            let mut row = vec![name.to_owned()];
            for c in &columns {
                let k = c.calibration.chart;
                row.extend([String::new(), String::new(), f(if upper { k.ucl } else { k.lcl }, 4), String::new()]);
            }
            t.row(row);
        }
        text.push_str(&format!("case {case}, lambda = {lambda}, true model {true_model}\n{}\n", t.render()));
        blocks.push(RobustnessBlock { case, true_model, columns });
    }
    Ok(Outcome::new(&blocks, text))
}

#[derive(Debug, Serialize)]
struct LRow {
    case: usize,
    model: UnitModel,
    calibrations: Vec<Calibration>,
}

fn l_values(config: &DesignConfig) -> Result<Outcome, CliError> {
    let mut rows = Vec::new();
    let mut header = vec!["case".to_owned(), "model".to_owned()];
    for lambda in LAMBDAS {
        header.extend([format!("L (l={lambda})"), "ARL0".into(), "se".into()]);
    }
    let mut t = TextTable::new(header);
    for family in Family::ALL {
        for case in 1..=4 {
            let model = case_models(case)?[family as usize];
            let calibrations = LAMBDAS
                .iter()
                .map(|&lambda| calibrate_l(&model, lambda, config))
                .collect::<Result<Vec<_>, _>>()?;
            let mut row = vec![case.to_string(), model.to_string()];
            for c in &calibrations {
                row.extend([f(c.l, 3), f(c.achieved.arl, 2), f(c.achieved.se_arl, 2)]);
            }
            t.row(row);
            rows.push(LRow { case, model, calibrations });
        }
    }
    Ok(Outcome::new(&rows, t.render()))
}
