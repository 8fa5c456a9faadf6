//! Shewhart and EWMA control charts for processes on the open unit interval,
//! under mean-parametrized Beta, Simplex and Unit Gamma models.
//!
//! ```
//! use unitchart::charts::{shewhart_limits, Chart};
//! use unitchart::models::{Family, UnitModel};
//! use unitchart::simulation::{calibrate_l, DesignConfig};
//!
//! let model = UnitModel::new(Family::Simplex, 0.2, 0.5)?;
//! let shewhart = shewhart_limits(&model, 0.0027)?;
//! assert!(shewhart.lcl < 0.2 && 0.2 < shewhart.ucl);
//! let config = DesignConfig { seed: 7, n_runs: 2000, ..DesignConfig::default() };
//! let design = calibrate_l(&model, 0.1, &config)?;
//! let result = Chart::Ewma(design.chart).monitor(&[0.21, 0.18, 0.26, 0.30], false)?;
//! assert_eq!(result.statistic_path.len(), 4);
//! # Ok::<(), unitchart::Error>(())
//! ```

// NaN-rejecting guards are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod charts;
pub mod datasets;
pub mod error;
pub mod inference;
pub mod models;
pub mod numerics;
pub mod simulation;

pub use error::{Error, Result};
