//! Unit-interval probability models in mean-centric parametrizations.
//!
//! Every family is indexed by its mean `mu` plus one dispersion-type
//! parameter, so a mean shift is expressed by [`UnitModel::with_mean`] while
//! the dispersion stays fixed.

mod beta;
mod likelihood;
mod sampler;
mod simplex;
mod unit_gamma;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use beta::BetaMeanPrecision;
pub use likelihood::Likelihood;
pub use sampler::Sampler;
pub use simplex::{SimplexParams, SimplexTable};
pub use unit_gamma::UnitGammaMeanShape;

use crate::error::{Error, Result};

/// Value returned by [`log_likelihood`] for parameters outside the family's
/// domain, so a minimizer can back away instead of seeing NaN.
pub const INVALID_LOGLIK: f64 = -1e100;

/// Family tag. The declaration order is the tie-break order used in model
/// ranking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Beta,
    Simplex,
    #[serde(rename = "unitgamma")]
    UnitGamma,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Beta, Family::Simplex, Family::UnitGamma];

    /// Name of the dispersion parameter (`phi`, `sigma` or `tau`).
    pub fn dispersion_name(self) -> &'static str {
        match self {
            Family::Beta => "phi",
            Family::Simplex => "sigma",
            Family::UnitGamma => "tau",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Beta => "beta",
            Family::Simplex => "simplex",
            Family::UnitGamma => "unitgamma",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_', ' '], "").as_str() {
            "beta" => Ok(Family::Beta),
            "simplex" => Ok(Family::Simplex),
            "unitgamma" | "uga" | "ugamma" => Ok(Family::UnitGamma),
            other => Err(Error::domain(format!("unknown family '{other}'"))),
        }
    }
}

/// One of the three unit-interval families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum UnitModel {
    Beta(BetaMeanPrecision),
    Simplex(SimplexParams),
    #[serde(rename = "unitgamma")]
    UnitGamma(UnitGammaMeanShape),
}

/// Summary of the first four moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub mean: f64,
    pub variance: f64,
    pub std_dev: f64,
    /// Coefficient of variation `std_dev / mean`.
    pub cv: f64,
    pub skewness: f64,
    /// Kurtosis on the scale where the normal distribution has 3.
    pub ex_kurtosis_plus3: f64,
}

fn check_open_unit(x: f64, what: &str) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{what} must lie in (0, 1), got {x}")))
    }
}

impl UnitModel {
    /// Builds a model from a family tag, mean and dispersion parameter.
    pub fn new(family: Family, mu: f64, dispersion: f64) -> Result<Self> {
        Ok(match family {
            Family::Beta => UnitModel::Beta(BetaMeanPrecision::new(mu, dispersion)?),
            Family::Simplex => UnitModel::Simplex(SimplexParams::new(mu, dispersion)?),
            Family::UnitGamma => UnitModel::UnitGamma(UnitGammaMeanShape::new(mu, dispersion)?),
        })
    }

    pub fn family(&self) -> Family {
        match self {
            UnitModel::Beta(_) => Family::Beta,
            UnitModel::Simplex(_) => Family::Simplex,
            UnitModel::UnitGamma(_) => Family::UnitGamma,
        }
    }

    pub fn mu(&self) -> f64 {
        match self {
            UnitModel::Beta(m) => m.mu,
            UnitModel::Simplex(m) => m.mu,
            UnitModel::UnitGamma(m) => m.mu,
        }
    }

    /// The dispersion-type parameter: `phi`, `sigma` or `tau`.
    pub fn dispersion(&self) -> f64 {
        match self {
            UnitModel::Beta(m) => m.phi,
            UnitModel::Simplex(m) => m.sigma,
            UnitModel::UnitGamma(m) => m.tau,
        }
    }

    /// Same family and dispersion, mean moved to `mu`.
    pub fn with_mean(&self, mu: f64) -> Result<Self> {
        UnitModel::new(self.family(), mu, self.dispersion())
    }

    /// Density at `x ∈ (0, 1)`.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        check_open_unit(x, "pdf argument")?;
        Ok(self.ln_pdf_unchecked(x).exp())
    }

    /// Log density at `x ∈ (0, 1)`.
    pub fn ln_pdf(&self, x: f64) -> Result<f64> {
        check_open_unit(x, "pdf argument")?;
        Ok(self.ln_pdf_unchecked(x))
    }

    pub(crate) fn ln_pdf_unchecked(&self, x: f64) -> f64 {
        match self {
            UnitModel::Beta(m) => m.ln_pdf(x),
            UnitModel::Simplex(m) => m.ln_pdf(x),
            UnitModel::UnitGamma(m) => m.ln_pdf(x),
        }
    }

    /// Distribution function on `[0, 1]`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::domain(format!("cdf argument must lie in [0, 1], got {x}")));
        }
        if x == 0.0 {
            return Ok(0.0);
        }
        if x == 1.0 {
            return Ok(1.0);
        }
        match self {
            UnitModel::Beta(m) => Ok(m.cdf(x)),
            UnitModel::Simplex(m) => m.cdf(x),
            UnitModel::UnitGamma(m) => Ok(m.cdf(x)),
        }
    }

    /// Upper tail `1 - F(x)`, computed directly where that matters.
    /// `(cdf, sf)` at each point of an ascending sample inside `(0, 1)`.
    /// For the Simplex family the support is located once and the integrals
    /// accumulate between consecutive points.
    pub fn cdf_sf_sorted(&self, xs: &[f64]) -> Result<Vec<(f64, f64)>> {
        check_data(xs)?;
        if xs.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::domain("cdf_sf_sorted: points must be ascending"));
        }
        match self {
            UnitModel::Simplex(m) => m.cdf_sf_sorted(xs),
            _ => xs.iter().map(|&x| Ok((self.cdf(x)?, self.sf(x)?))).collect(),
        }
    }

    pub fn sf(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::domain(format!("sf argument must lie in [0, 1], got {x}")));
        }
        if x == 0.0 {
            return Ok(1.0);
        }
        if x == 1.0 {
            return Ok(0.0);
        }
        match self {
            UnitModel::Beta(m) => Ok(m.sf(x)),
            UnitModel::Simplex(m) => m.sf(x),
            UnitModel::UnitGamma(m) => Ok(m.sf(x)),
        }
    }

    /// Quantile function on `(0, 1)`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        check_open_unit(p, "probability")?;
        match self {
            UnitModel::Beta(m) => m.quantile(p),
            UnitModel::Simplex(m) => m.quantile(p),
            UnitModel::UnitGamma(m) => m.quantile(p),
        }
    }

    /// Equal to `mu` for all three families.
    pub fn mean(&self) -> f64 {
        self.mu()
    }

    pub fn variance(&self) -> f64 {
        match self {
            UnitModel::Beta(m) => m.variance(),
            UnitModel::Simplex(m) => m.variance(),
            UnitModel::UnitGamma(m) => m.variance(),
        }
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    pub fn moment_report(&self) -> Result<MomentReport> {
        let variance = self.variance();
        let (skewness, kurt) = match self {
            UnitModel::Beta(m) => m.shape_moments(),
            UnitModel::Simplex(m) => m.shape_moments()?,
            UnitModel::UnitGamma(m) => m.shape_moments(),
        };
        let std_dev = variance.sqrt();
        Ok(MomentReport {
            mean: self.mean(),
            variance,
            std_dev,
            cv: std_dev / self.mean(),
            skewness,
            ex_kurtosis_plus3: kurt,
        })
    }

    /// Prepares a sampler. For the Simplex family this builds the cached
    /// inverse-cdf table once.
    pub fn sampler(&self) -> Result<Sampler> {
        Sampler::new(*self)
    }
}

impl fmt::Display for UnitModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}(mu={}, {}={})",
            self.family(),
            self.mu(),
            self.family().dispersion_name(),
            self.dispersion()
        )
    }
}

/// Validates that every observation is strictly inside (0, 1).
pub fn check_data(data: &[f64]) -> Result<()> {
    match data.iter().position(|&x| !(x > 0.0 && x < 1.0)) {
        Some(index) => Err(Error::Data {
            index,
            value: data[index],
        }),
        None => Ok(()),
    }
}

/// `Σ ln f(xᵢ)` for `params = [mu, dispersion]` on the original scale.
///
/// Invalid parameters give [`INVALID_LOGLIK`] rather than an error.
pub fn log_likelihood(family: Family, params: &[f64], data: &[f64]) -> Result<f64> {
    check_data(data)?;
    if params.len() != 2 {
        return Err(Error::domain(format!(
            "log_likelihood expects 2 parameters, got {}",
            params.len()
        )));
    }
    Ok(Likelihood::new(family, data).eval(params[0], params[1]))
}
