//! Special functions and numeric kernels.
//!
//! Everything here is a pure function of its arguments. The model layer builds
//! densities, distribution functions and quantiles on top of these; the
//! inference layer uses the minimizer and Hessian for likelihood fits.

mod beta;
mod gamma;
mod optim;
mod quad;
mod roots;

pub use beta::{inv_reg_inc_beta, ln_beta, reg_inc_beta};
pub use gamma::{
    inv_reg_upper_gamma, log_gamma, reg_lower_gamma, reg_upper_gamma, scaled_upper_gamma,
};
pub use optim::{minimize, numeric_hessian, Minimum};
pub use quad::{gauss_legendre, quad};
pub use roots::find_root;

pub(crate) use beta::inc_beta_both as beta_both;
pub(crate) use gamma::{ln_gamma_unchecked, lower_unchecked, upper_unchecked};

use crate::error::{Error, Result};

/// Convergence controls shared by the iterative kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_iter: usize,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64, max_iter: usize) -> Result<Self> {
        if !(abs > 0.0) || !(rel > 0.0) || max_iter == 0 {
            return Err(Error::domain(format!(
                "tolerance requires abs > 0, rel > 0, max_iter >= 1 (got {abs}, {rel}, {max_iter})"
            )));
        }
        Ok(Tolerance { abs, rel, max_iter })
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-10,
            rel: 1e-10,
            max_iter: 200,
        }
    }
}

/// A closed search interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::domain(format!("invalid bracket [{lo}, {hi}]")));
        }
        Ok(Bracket { lo, hi })
    }
}
