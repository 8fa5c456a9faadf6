use rand::Rng;
use rand_distr::{Distribution, Gamma, Open01};

use super::{SimplexTable, UnitModel};
use crate::error::{Error, Result};

/// Prepared random-variate generator for one model.
///
/// Beta draws are `G₁ / (G₁ + G₂)` with independent gamma variates; Unit Gamma
/// draws are `exp(−G / θ)`; Simplex draws invert a cached cdf table.
/// All draws lie strictly inside `(0, 1)`.
#[derive(Debug, Clone)]
pub enum Sampler {
    Beta { a: Gamma<f64>, b: Gamma<f64> },
    Simplex(Box<SimplexTable>),
    UnitGamma { shape: Gamma<f64>, theta: f64 },
}

fn gamma(shape: f64) -> Result<Gamma<f64>> {
    Gamma::new(shape, 1.0).map_err(|e| Error::domain(format!("gamma sampler: {e}")))
}

fn clamp_open(x: f64) -> f64 {
    x.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}

impl Sampler {
    pub fn new(model: UnitModel) -> Result<Self> {
        Ok(match model {
            UnitModel::Beta(m) => Sampler::Beta { a: gamma(m.alpha())?, b: gamma(m.beta())? },
            UnitModel::Simplex(m) => Sampler::Simplex(Box::new(SimplexTable::new(m)?)),
            UnitModel::UnitGamma(m) => Sampler::UnitGamma { shape: gamma(m.tau)?, theta: m.theta() },
        })
    }
}

impl Distribution<f64> for Sampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Sampler::Beta { a, b } => {
                let x = a.sample(rng);
                let y = b.sample(rng);
                if x + y > 0.0 {
                    clamp_open(x / (x + y))
                } else {
                    // Both underflowed (tiny shapes): fall back to a fair split.
                    0.5
                }
            }
            Sampler::Simplex(table) => {
                let u: f64 = Open01.sample(rng);
                table.invert(u)
            }
            Sampler::UnitGamma { shape, theta } => clamp_open((-shape.sample(rng) / theta).exp()),
        }
    }
}
