//! The four matched in-control designs at `mu0 = 0.2`. Within a case the
//! three families have nearly equal standard deviations.

use crate::error::Result;
use crate::models::{Family, UnitModel};

pub const MU0: f64 = 0.2;

/// `(phi, sigma, tau)` per case, from least to most dispersed.
pub const CASES: [(f64, f64, f64); 4] = [(290.0, 0.37, 155.0), (148.0, 0.50, 96.0), (80.0, 0.71, 51.0), (31.0, 1.20, 20.0)];

/// Smoothing constants studied for each case.
pub const LAMBDAS: [f64; 3] = [0.05, 0.10, 0.20];

/// Models of case `k` (1-based) in family order Beta, Simplex, Unit Gamma.
pub fn case_models(k: usize) -> Result<[UnitModel; 3]> {
    let (phi, sigma, tau) = *CASES
        .get(k.wrapping_sub(1))
        .ok_or_else(|| crate::Error::domain(format!("case must be 1..=4, got {k}")))?;
    Ok([
        UnitModel::new(Family::Beta, MU0, phi)?,
        UnitModel::new(Family::Simplex, MU0, sigma)?,
        UnitModel::new(Family::UnitGamma, MU0, tau)?,
    ])
}

/// Dispersion of `family` in case `k` (1-based).
pub fn dispersion(family: Family, k: usize) -> Result<f64> {
    Ok(case_models(k)?[family as usize].dispersion())
}
