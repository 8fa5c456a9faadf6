use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{find_root, gauss_legendre, quad, scaled_upper_gamma, Bracket, Tolerance};

const LN_TWO_PI: f64 = 1.837_877_066_409_345_5;
/// Knot count of the inverse-cdf table.
pub const TABLE_PANELS: usize = 2048;
/// Log-density drop (relative to the mode) that bounds the effective support.
const SUPPORT_DROP: f64 = 50.0;
const SCAN_LIMIT: f64 = 40.0;
const SCAN_STEP: f64 = 0.01;

/// Simplex distribution `S(mu, sigma²)`.
///
/// No closed-form cdf exists, so probabilities are integrals of the density
/// in logit coordinates `y = ln(x / (1 − x))`, where the density is smooth
/// and has no endpoint behavior to resolve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimplexParams {
    pub mu: f64,
    pub sigma: f64,
}

fn logit(x: f64) -> f64 {
    (x / (1.0 - x)).ln()
}

fn logistic(y: f64) -> f64 {
    1.0 / (1.0 + (-y).exp())
}

fn quad_tol() -> Tolerance {
    Tolerance {
        abs: 1e-16,
        rel: 1e-13,
        max_iter: 400,
    }
}

impl SimplexParams {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !(mu > 0.0 && mu < 1.0) || !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::domain(format!(
                "simplex model requires 0 < mu < 1 and sigma > 0, got ({mu}, {sigma})"
            )));
        }
        Ok(SimplexParams { mu, sigma })
    }

    /// Unit deviance `d(x; mu)`.
    pub fn deviance(&self, x: f64) -> f64 {
        let m = self.mu * (1.0 - self.mu);
        (x - self.mu).powi(2) / (x * (1.0 - x) * m * m)
    }

    pub(crate) fn ln_pdf(&self, x: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        -0.5 * (LN_TWO_PI + s2.ln()) - 1.5 * (x * (1.0 - x)).ln() - self.deviance(x) / (2.0 * s2)
    }

    /// Log density of `Y = logit(X)`.
    pub(crate) fn ln_density_logit(&self, y: f64) -> f64 {
        // x and 1 − x both from y so neither loses precision near the ends.
        let x = logistic(y);
        let ln_x = -(-y).exp().ln_1p();
        let ln_1mx = -y.exp().ln_1p();
        let xq = x * logistic(-y);
        let m = self.mu * (1.0 - self.mu);
        let d = (x - self.mu).powi(2) / (xq * m * m);
        let s2 = self.sigma * self.sigma;
        -0.5 * (LN_TWO_PI + s2.ln()) - 0.5 * (ln_x + ln_1mx) - d / (2.0 * s2)
    }

    pub(crate) fn density_logit(&self, y: f64) -> f64 {
        self.ln_density_logit(y).exp()
    }

    /// Logit-scale interval outside of which the density is below
    /// `e^{-50}` times its maximum.
    pub(crate) fn effective_range(&self) -> (f64, f64) {
        let n = (2.0 * SCAN_LIMIT / SCAN_STEP) as usize;
        let at = |i: usize| -SCAN_LIMIT + i as f64 * SCAN_STEP;
        let values: Vec<f64> = (0..=n).map(|i| self.ln_density_logit(at(i))).collect();
        let (best, _) = values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });

        // Refine the mode by golden-section search around the best scan point.
        let (mut a, mut b) = (at(best.saturating_sub(1)), at((best + 1).min(n)));
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let c = b - phi * (b - a);
            let d = a + phi * (b - a);
            if self.ln_density_logit(c) > self.ln_density_logit(d) {
                b = d;
            } else {
                a = c;
            }
        }
        let mode = 0.5 * (a + b);
        let peak = self.ln_density_logit(mode).max(values[best]);
        let cut = peak - SUPPORT_DROP;
        let h = |y: f64| self.ln_density_logit(y) - cut;

        let first = values.iter().position(|&v| v >= cut);
        let last = values.iter().rposition(|&v| v >= cut);
        let bisect = |mut out: f64, mut inside: f64| {
            for _ in 0..60 {
                let mid = 0.5 * (out + inside);
                if h(mid) >= 0.0 {
                    inside = mid;
                } else {
                    out = mid;
                }
            }
            out
        };
        let lo = match first {
            Some(0) => -SCAN_LIMIT,
            Some(i) => bisect(at(i - 1), at(i)),
            None => bisect(mode - SCAN_STEP, mode),
        };
        let hi = match last {
            Some(i) if i == n => SCAN_LIMIT,
            Some(i) => bisect(at(i + 1), at(i)),
            None => bisect(mode + SCAN_STEP, mode),
        };
        (lo, hi)
    }

    /// `∫ g(y) dy` over `[a, b]` in logit coordinates, in `pieces` sub-intervals.
    fn integrate_logit<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64, pieces: usize) -> Result<f64> {
        if b <= a {
            return Ok(0.0);
        }
        let w = (b - a) / pieces as f64;
        let mut total = 0.0;
        for i in 0..pieces {
            let lo = a + i as f64 * w;
            let hi = if i + 1 == pieces { b } else { lo + w };
            total += quad(&f, lo, hi, quad_tol())?;
        }
        Ok(total)
    }

    pub(crate) fn cdf(&self, x: f64) -> Result<f64> {
        let y = logit(x);
        let (lo, hi) = self.effective_range();
        if y <= logit(self.mu) {
            let start = lo.min(y - 1.0);
            let pieces = pieces_for(y - start, hi - lo);
            self.integrate_logit(|t| self.density_logit(t), start, y, pieces)
                .map(|v| v.clamp(0.0, 1.0))
        } else {
            self.sf(x).map(|s| (1.0 - s).clamp(0.0, 1.0))
        }
    }

    pub(crate) fn sf(&self, x: f64) -> Result<f64> {
        let y = logit(x);
        let (lo, hi) = self.effective_range();
        if y > logit(self.mu) {
            let end = hi.max(y + 1.0);
            let pieces = pieces_for(end - y, hi - lo);
            self.integrate_logit(|t| self.density_logit(t), y, end, pieces)
                .map(|v| v.clamp(0.0, 1.0))
        } else {
            self.cdf(x).map(|c| (1.0 - c).clamp(0.0, 1.0))
        }
    }

    pub(crate) fn cdf_sf_sorted(&self, xs: &[f64]) -> Result<Vec<(f64, f64)>> {
        let (lo, hi) = self.effective_range();
        let support = hi - lo;
        let g = |t: f64| self.density_logit(t);
        let ys: Vec<f64> = xs.iter().map(|&x| logit(x)).collect();
        let split = ys.partition_point(|&y| y <= logit(self.mu));
        let mut out = vec![(0.0, 0.0); ys.len()];

        let mut acc = 0.0;
        let mut prev = ys.first().map_or(lo, |&y| lo.min(y - 1.0));
        for i in 0..split {
            acc += self.integrate_logit(g, prev, ys[i], pieces_for(ys[i] - prev, support))?;
            prev = ys[i];
            let c = acc.clamp(0.0, 1.0);
            out[i] = (c, 1.0 - c);
        }
        let mut acc = 0.0;
        let mut next = ys.last().map_or(hi, |&y| hi.max(y + 1.0));
        for i in (split..ys.len()).rev() {
            acc += self.integrate_logit(g, ys[i], next, pieces_for(next - ys[i], support))?;
            next = ys[i];
            let s = acc.clamp(0.0, 1.0);
            out[i] = (1.0 - s, s);
        }
        Ok(out)
    }

    pub(crate) fn quantile(&self, p: f64) -> Result<f64> {
        SimplexTable::new(*self)?.quantile(p)
    }

    /// `mu(1 − mu) − e^{c} Γ(1/2, c) / √(2σ²)` with `c = 1 / (2σ² mu² (1 − mu)²)`.
    pub(crate) fn variance(&self) -> f64 {
        let s2 = self.sigma * self.sigma;
        let m = self.mu * (1.0 - self.mu);
        let c = 1.0 / (2.0 * s2 * m * m);
        let tail = scaled_upper_gamma(0.5, c).unwrap_or(f64::NAN);
        m - tail / (2.0 * s2).sqrt()
    }

    pub(crate) fn shape_moments(&self) -> Result<(f64, f64)> {
        let (lo, hi) = self.effective_range();
        let var = self.variance();
        let central = |k: i32| {
            self.integrate_logit(
                |y| (logistic(y) - self.mu).powi(k) * self.density_logit(y),
                lo,
                hi,
                32,
            )
        };
        Ok((central(3)? / var.powf(1.5), central(4)? / (var * var)))
    }
}

fn pieces_for(width: f64, support: f64) -> usize {
    ((32.0 * width / support.max(1e-12)).ceil() as usize).clamp(1, 64)
}

/// Cached inverse-cdf table for one Simplex parameter pair.
///
/// Knots are evenly spaced in logit coordinates over the effective support;
/// cumulative probabilities come from ten-point Gauss-Legendre panels.
/// Quantiles are root-refined inside the bracketing panel.
#[derive(Debug, Clone)]
pub struct SimplexTable {
    params: SimplexParams,
    knots: Vec<f64>,
    cum: Vec<f64>,
    dens: Vec<f64>,
    norm: f64,
}

impl SimplexTable {
    pub fn new(params: SimplexParams) -> Result<Self> {
        let (lo, hi) = params.effective_range();
        if !(hi > lo) {
            return Err(Error::numeric("simplex table: empty effective support", lo, hi));
        }
        let width = (hi - lo) / TABLE_PANELS as f64;
        let knots: Vec<f64> = (0..=TABLE_PANELS)
            .map(|i| if i == TABLE_PANELS { hi } else { lo + i as f64 * width })
            .collect();
        let g = |y: f64| params.density_logit(y);
        let mut cum = Vec::with_capacity(knots.len());
        cum.push(0.0);
        let mut acc = 0.0;
        for w in knots.windows(2) {
            acc += gauss_legendre(g, w[0], w[1]);
            cum.push(acc);
        }
        let norm = acc;
        if !(norm > 0.0) || !norm.is_finite() || (norm - 1.0).abs() > 1e-6 {
            return Err(Error::numeric("simplex table: density does not normalize", norm, (norm - 1.0).abs()));
        }
        for c in cum.iter_mut() {
            *c /= norm;
        }
        let dens = knots.iter().map(|&y| g(y) / norm).collect();
        Ok(SimplexTable {
            params,
            knots,
            cum,
            dens,
            norm,
        })
    }

    pub fn params(&self) -> SimplexParams {
        self.params
    }

    fn panel_of(&self, p: f64) -> usize {
        // Largest k with cum[k] <= p, capped to the last panel.
        let k = self.cum.partition_point(|&c| c <= p);
        k.saturating_sub(1).min(TABLE_PANELS - 1)
    }

    fn partial(&self, k: usize, y: f64) -> f64 {
        let g = |t: f64| self.params.density_logit(t);
        self.cum[k] + gauss5(g, self.knots[k], y) / self.norm
    }

    /// Quantile by Brent's method inside the bracketing panel.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain(format!("probability must lie in (0, 1), got {p}")));
        }
        let k = self.panel_of(p);
        let (a, b) = (self.knots[k], self.knots[k + 1]);
        let f = |y: f64| self.cum[k] + gauss_legendre(|t| self.params.density_logit(t), a, y) / self.norm - p;
        let tol = Tolerance {
            abs: 1e-15,
            rel: 1e-15,
            max_iter: 200,
        };
        let y = if f(a) >= 0.0 {
            a
        } else if f(b) <= 0.0 {
            b
        } else {
            find_root(f, Bracket::new(a, b)?, tol)?
        };
        Ok(clamp_open(logistic(y)))
    }

    /// Maps a uniform variate to a draw: cubic Hermite inverse in the panel,
    /// then one Newton step on the exact panel integral.
    pub(crate) fn invert(&self, u: f64) -> f64 {
        let k = self.panel_of(u);
        let (y0, y1) = (self.knots[k], self.knots[k + 1]);
        let h = y1 - y0;
        let (f0, f1) = (self.cum[k], self.cum[k + 1]);
        let (m0, m1) = (h * self.dens[k], h * self.dens[k + 1]);
        let span = f1 - f0;
        let mut t = if span > 0.0 { ((u - f0) / span).clamp(0.0, 1.0) } else { 0.5 };
        for _ in 0..3 {
            let t2 = t * t;
            let t3 = t2 * t;
            let val = (2.0 * t3 - 3.0 * t2 + 1.0) * f0
                + (t3 - 2.0 * t2 + t) * m0
                + (-2.0 * t3 + 3.0 * t2) * f1
                + (t3 - t2) * m1;
            let der = (6.0 * t2 - 6.0 * t) * (f0 - f1) + (3.0 * t2 - 4.0 * t + 1.0) * m0 + (3.0 * t2 - 2.0 * t) * m1;
            if der <= 0.0 {
                break;
            }
            t = (t - (val - u) / der).clamp(0.0, 1.0);
        }
        let mut y = y0 + t * h;
        let dens = self.params.density_logit(y) / self.norm;
        if dens > 0.0 {
            y = (y - (self.partial(k, y) - u) / dens).clamp(y0, y1);
        }
        clamp_open(logistic(y))
    }
}

fn clamp_open(x: f64) -> f64 {
    x.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}

const GL5_X: [f64; 2] = [0.538_469_310_105_683_1, 0.906_179_845_938_664];
const GL5_W: [f64; 3] = [0.568_888_888_888_888_9, 0.478_628_670_499_366_5, 0.236_926_885_056_189_1];

fn gauss5<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = GL5_W[0] * f(c);
    for (x, w) in GL5_X.iter().zip(&GL5_W[1..]) {
        s += w * (f(c - h * x) + f(c + h * x));
    }
    s * h
}
