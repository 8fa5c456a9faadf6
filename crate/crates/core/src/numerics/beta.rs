use super::gamma::ln_gamma_unchecked;
use crate::error::{Error, Result};

const EPS: f64 = f64::EPSILON;
const TINY: f64 = 1e-300;
const MAX_TERMS: usize = 10_000;

/// `ln B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma_unchecked(a) + ln_gamma_unchecked(b) - ln_gamma_unchecked(a + b)
}

fn check_shapes(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0) || !(b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::domain(format!(
            "incomplete beta requires a, b > 0, got ({a}, {b})"
        )));
    }
    Ok(())
}

/// Continued fraction for the incomplete beta (modified Lentz).
fn fraction(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..MAX_TERMS {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Returns `(I_x(a, b), 1 - I_x(a, b))`, each accurate in its own tail.
pub(crate) fn inc_beta_both(x: f64, a: f64, b: f64) -> (f64, f64) {
    if x <= 0.0 {
        return (0.0, 1.0);
    }
    if x >= 1.0 {
        return (1.0, 0.0);
    }
    let ln_front = a * x.ln() + b * (-x).ln_1p() - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        let lower = (ln_front.exp() * fraction(a, b, x) / a).clamp(0.0, 1.0);
        (lower, 1.0 - lower)
    } else {
        let upper = (ln_front.exp() * fraction(b, a, 1.0 - x) / b).clamp(0.0, 1.0);
        (1.0 - upper, upper)
    }
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn reg_inc_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    check_shapes(a, b)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("incomplete beta requires 0 <= x <= 1, got {x}")));
    }
    Ok(inc_beta_both(x, a, b).0)
}

/// Inverse of `I_x(a, b)` in `x`.
///
/// Analytic starting point, then Halley steps kept inside a shrinking bracket
/// with bisection whenever a step would leave it.
pub fn inv_reg_inc_beta(p: f64, a: f64, b: f64) -> Result<f64> {
    check_shapes(a, b)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("inverse incomplete beta requires 0 < p < 1, got {p}")));
    }
    let q = 1.0 - p;
    let a1 = a - 1.0;
    let b1 = b - 1.0;
    let mut x = initial_beta_guess(p, a, b);
    let afac = -ln_beta(a, b);
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut best = (f64::INFINITY, x);

    for _ in 0..200 {
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        let (lower, upper) = inc_beta_both(x, a, b);
        let err = if p < 0.5 { lower - p } else { q - upper };
        if err.abs() < best.0 {
            best = (err.abs(), x);
        }
        if err == 0.0 {
            return Ok(x);
        }
        if err < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let dens = (a1 * x.ln() + b1 * (-x).ln_1p() + afac).exp();
        let mut next = if dens > 0.0 && dens.is_finite() {
            let u = err / dens;
            let corr = (u * (a1 / x - b1 / (1.0 - x))).min(1.0);
            x - u / (1.0 - 0.5 * corr)
        } else {
            f64::NAN
        };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 4.0 * EPS * x.min(1.0 - x).max(f64::MIN_POSITIVE)
            || hi - lo <= 4.0 * EPS * x
        {
            return Ok(next);
        }
        x = next;
    }
    if best.0 < 1e-10 {
        return Ok(best.1);
    }
    Err(Error::numeric("inverse incomplete beta did not converge", best.1, best.0))
}

fn initial_beta_guess(p: f64, a: f64, b: f64) -> f64 {
    if a >= 1.0 && b >= 1.0 {
        let pp = if p < 0.5 { p } else { 1.0 - p };
        let t = (-2.0 * pp.ln()).sqrt();
        let mut z = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t;
        if p < 0.5 {
            z = -z;
        }
        let al = (z * z - 3.0) / 6.0;
        let h = 2.0 / (1.0 / (2.0 * a - 1.0) + 1.0 / (2.0 * b - 1.0));
        let w = z * (al + h).sqrt() / h
            - (1.0 / (2.0 * b - 1.0) - 1.0 / (2.0 * a - 1.0)) * (al + 5.0 / 6.0 - 2.0 / (3.0 * h));
        a / (a + b * (2.0 * w).exp())
    } else {
        let lna = (a / (a + b)).ln();
        let lnb = (b / (a + b)).ln();
        let t = (a * lna).exp() / a;
        let u = (b * lnb).exp() / b;
        let w = t + u;
        if p < t / w {
            (a * w * p).powf(1.0 / a)
        } else {
            1.0 - (b * w * (1.0 - p)).powf(1.0 / b)
        }
    }
}
