use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use unitchart::models::{Family, UnitModel};
use unitchart::simulation::DesignConfig;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "unitchart", version, about = "Shewhart and EWMA control charts for unit-interval data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Worker threads for simulation (default: all cores).
    #[arg(long, global = true, env = "UNITCHART_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit all three families to a data file, with goodness of fit and a runs test.
    Fit(FitArgs),
    /// Calibrate EWMA limits to a target in-control ARL.
    Design(DesignArgs),
    /// Run-length performance of a chart across mean shifts.
    Evaluate(EvaluateArgs),
    /// Cross-model study: charts designed under one family, data from another.
    Robustness(RobustnessArgs),
    /// Phase I fit and Phase II monitoring with Shewhart and EWMA charts.
    Monitor(MonitorArgs),
    /// Regenerate one of the reference tables (3, 4-6, 7-15, A.1).
    Tables(TablesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    Beta,
    Simplex,
    Unitgamma,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Beta => Family::Beta,
            FamilyArg::Simplex => Family::Simplex,
            FamilyArg::Unitgamma => Family::UnitGamma,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// In-control mean.
    #[arg(long)]
    pub mu: f64,
    /// Beta precision.
    #[arg(long, group = "dispersion")]
    pub phi: Option<f64>,
    /// Simplex dispersion.
    #[arg(long, group = "dispersion")]
    pub sigma: Option<f64>,
    /// Unit Gamma shape.
    #[arg(long, group = "dispersion")]
    pub tau: Option<f64>,
}

impl ModelArgs {
    pub fn model(&self) -> Result<UnitModel, CliError> {
        let family = Family::from(self.family);
        let (value, name) = match family {
            Family::Beta => (self.phi, "--phi"),
            Family::Simplex => (self.sigma, "--sigma"),
            Family::UnitGamma => (self.tau, "--tau"),
        };
        let value = value.ok_or_else(|| CliError::Usage(format!("family {family} needs {name}")))?;
        Ok(UnitModel::new(family, self.mu, value)?)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimArgs {
    /// Target in-control ARL.
    #[arg(long, default_value_t = 370.4)]
    pub arl0: f64,
    /// Monte Carlo replications per ARL estimate.
    #[arg(long, default_value_t = 10_000)]
    pub runs: usize,
    /// Master seed for all random streams (required whenever simulation runs).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Calibration tolerance: achieved ARL within (arl0 - xi, arl0 + xi).
    #[arg(long, default_value_t = 4.0)]
    pub xi: f64,
    /// Replications longer than this are censored.
    #[arg(long, default_value_t = 5_000_000)]
    pub rl_cap: u64,
}

impl SimArgs {
    pub fn config(&self) -> Result<DesignConfig, CliError> {
        let seed = self.seed.ok_or_else(|| CliError::Usage("this command simulates; pass --seed".into()))?;
        let c = DesignConfig {
            arl0: self.arl0,
            xi: self.xi,
            n_runs: self.runs,
            seed,
            rl_cap: self.rl_cap,
            ..DesignConfig::default()
        };
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AdArg {
    Bootstrap,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RunsArg {
    Normal,
    Exact,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitArgs {
    /// One value per line, optional header line.
    pub input: PathBuf,
    /// Anderson-Darling p-value method.
    #[arg(long, value_enum, default_value_t = AdArg::Bootstrap)]
    pub ad: AdArg,
    /// Bootstrap resamples.
    #[arg(long, default_value_t = 1000)]
    pub resamples: usize,
    /// Bootstrap seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Runs test p-value method.
    #[arg(long, value_enum, default_value_t = RunsArg::Normal)]
    pub runs_test: RunsArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DesignArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// EWMA smoothing constant; repeat for several charts.
    #[arg(long = "lambda", required = true)]
    pub lambdas: Vec<f64>,
    #[command(flatten)]
    pub sim: SimArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChartKind {
    Shewhart,
    Ewma,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value_t = ChartKind::Ewma)]
    pub chart: ChartKind,
    /// EWMA smoothing constant.
    #[arg(long = "lambda")]
    pub lambda: Option<f64>,
    /// EWMA width; calibrated at the seed when omitted.
    #[arg(long = "L")]
    pub l: Option<f64>,
    /// Shewhart false-alarm probability.
    #[arg(long, default_value_t = 0.0027)]
    pub alpha: f64,
    /// Mean shift; repeat for several (default 0, ±0.02, ±0.04, ±0.06, ±0.08).
    #[arg(long = "delta", allow_hyphen_values = true)]
    pub deltas: Vec<f64>,
    /// Append the exact Shewhart run-length summary to each row.
    #[arg(long)]
    pub with_shewhart: bool,
    #[command(flatten)]
    pub sim: SimArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RobustnessArgs {
    /// Dispersion case 1-4 (in-control mean 0.2).
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    pub case: u8,
    /// EWMA smoothing constant; repeat for several studies.
    #[arg(long = "lambda", required = true)]
    pub lambdas: Vec<f64>,
    #[command(flatten)]
    pub sim: SimArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MonitorArgs {
    /// Phase I data file.
    pub phase1: PathBuf,
    /// Phase II data file.
    pub phase2: PathBuf,
    /// Use this family instead of the best by AIC.
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    /// EWMA smoothing constants.
    #[arg(long = "lambda", default_values_t = [0.05, 0.10, 0.20])]
    pub lambdas: Vec<f64>,
    /// Shewhart false-alarm probability.
    #[arg(long, default_value_t = 0.0027)]
    pub alpha: f64,
    /// Monitor Phase II even if Phase I signals.
    #[arg(long)]
    pub force: bool,
    /// Write one SVG chart per monitored statistic into this directory.
    #[arg(long)]
    pub plot_dir: Option<PathBuf>,
    #[command(flatten)]
    pub sim: SimArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TablesArgs {
    /// Table id: 3, 4, 5, 6, 7-15 or A.1.
    pub id: String,
    /// Monte Carlo replications per ARL estimate.
    #[arg(long, default_value_t = 10_000)]
    pub runs: usize,
    /// Master seed (required for every table except 3).
    #[arg(long)]
    pub seed: Option<u64>,
}
