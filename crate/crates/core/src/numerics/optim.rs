use super::Tolerance;
use crate::error::{Error, Result};

/// Result of [`minimize`].
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub argmin: Vec<f64>,
    pub value: f64,
    /// Euclidean norm of the central-difference gradient at `argmin`.
    pub grad_norm: f64,
    pub iterations: usize,
}

fn gradient<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64]) -> Vec<f64> {
    gradient_scaled(f, x, 1.0)
}

fn gradient_scaled<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], scale: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let h = scale * 6e-6 * x[i].abs().max(1.0);
            probe[i] = x[i] + h;
            let up = f(&probe);
            probe[i] = x[i] - h;
            let down = f(&probe);
            probe[i] = x[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

/// Quasi-Newton (BFGS) minimization with central-difference gradients and an
/// Armijo backtracking line search.
///
/// Converged when the gradient norm is at most `tol.abs`. When the line search
/// can no longer strictly decrease `f` in floating point, the iterate is still
/// accepted if the gradient is within `max(tol.abs, tol.rel * max(1, |f|))`,
/// if the quasi-Newton predicted decrease `gᵀHg / 2` is below
/// `tol.rel * max(1, |f|)`, or if the gradient is dominated by finite-difference
/// noise; otherwise a numeric error carrying the best iterate's value is
/// returned.
pub fn minimize<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], tol: Tolerance) -> Result<Minimum> {
    let n = x0.len();
    if n == 0 {
        return Err(Error::domain("minimize: empty starting point"));
    }
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    if !fx.is_finite() {
        return Err(Error::domain("minimize: objective is not finite at the starting point"));
    }
    let mut g = gradient(&f, &x);
    let mut h = identity(n);
    let mut fresh = true;
    // Predicted decrease gᵀHg from the last curvature-informed step.
    let mut decrement = f64::INFINITY;

    for iter in 0..tol.max_iter {
        let gnorm = norm(&g);
        if gnorm <= tol.abs {
            return Ok(Minimum { argmin: x, value: fx, grad_norm: gnorm, iterations: iter });
        }
        let mut p: Vec<f64> = h.iter().map(|row| -dot(row, &g)).collect();
        let mut slope = dot(&p, &g);
        if !fresh && slope < 0.0 {
            decrement = -slope;
        }
        if !(slope < 0.0) {
            h = identity(n);
            fresh = true;
            p = g.iter().map(|v| -v).collect();
            slope = -gnorm * gnorm;
        }

        let mut t = 1.0;
        let mut accepted = None;
        while t > 1e-20 {
            let trial: Vec<f64> = x.iter().zip(&p).map(|(xi, pi)| xi + t * pi).collect();
            let ft = f(&trial);
            if ft.is_finite() && ft < fx && ft <= fx + 1e-4 * t * slope {
                accepted = Some((trial, ft));
                break;
            }
            t *= 0.5;
        }

        let Some((x_new, f_new)) = accepted else {
            if !fresh {
                h = identity(n);
                fresh = true;
                continue;
            }
            let resolution = tol.rel * fx.abs().max(1.0);
            let floor = tol.abs.max(resolution);
            if gnorm <= floor || 0.5 * decrement <= resolution || noise_dominated(&f, &x, &g) {
                return Ok(Minimum { argmin: x, value: fx, grad_norm: gnorm, iterations: iter });
            }
            return Err(Error::numeric(
                format!("minimize: line search stalled with gradient norm {gnorm:e}"),
                fx,
                gnorm,
            ));
        };

        let g_new = gradient(&f, &x_new);
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * norm(&s) * norm(&y) {
            if fresh {
                let scale = sy / dot(&y, &y);
                h = identity(n).into_iter().map(|r| r.into_iter().map(|v| v * scale).collect()).collect();
            }
            bfgs_update(&mut h, &s, &y, sy);
            fresh = false;
        }
        x = x_new;
        fx = f_new;
        g = g_new;
    }
    let gnorm = norm(&g);
    Err(Error::numeric(
        format!("minimize: iteration limit reached with gradient norm {gnorm:e}"),
        fx,
        gnorm,
    ))
}

/// `true` when doubling the difference step changes the gradient by at least
/// half its norm, i.e. the remaining gradient is rounding noise in `f`.
fn noise_dominated<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], g: &[f64]) -> bool {
    let g2 = gradient_scaled(f, x, 2.0);
    let diff: Vec<f64> = g.iter().zip(&g2).map(|(a, b)| a - b).collect();
    norm(&diff) >= 0.5 * norm(g)
}

/// `H <- (I - ρ s yᵀ) H (I - ρ y sᵀ) + ρ s sᵀ`
fn bfgs_update(h: &mut [Vec<f64>], s: &[f64], y: &[f64], sy: f64) {
    let n = s.len();
    let rho = 1.0 / sy;
    let hy: Vec<f64> = h.iter().map(|row| dot(row, y)).collect();
    let yhy = dot(y, &hy);
    for i in 0..n {
        for j in 0..n {
            h[i][j] += rho * ((1.0 + rho * yhy) * s[i] * s[j] - hy[i] * s[j] - s[i] * hy[j]);
        }
    }
}

/// Central second-difference Hessian of `f` at `x`.
///
/// `step` scales the per-coordinate step `hᵢ = max(step, 1e-4 |xᵢ|)`;
/// `step = 1e-4` keeps rounding error near `1e-8 |f|`. Symmetry is enforced
/// by averaging.
pub fn numeric_hessian<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], step: f64) -> Result<Vec<Vec<f64>>> {
    let n = x.len();
    let hs: Vec<f64> = x.iter().map(|v| step.max(1e-4 * v.abs())).collect();
    let f0 = f(x);
    let mut m = vec![vec![0.0; n]; n];
    let mut p = x.to_vec();
    for i in 0..n {
        p[i] = x[i] + hs[i];
        let up = f(&p);
        p[i] = x[i] - hs[i];
        let down = f(&p);
        p[i] = x[i];
        m[i][i] = (up - 2.0 * f0 + down) / (hs[i] * hs[i]);
        for j in 0..i {
            let mut eval = |di: f64, dj: f64| {
                p[i] = x[i] + di * hs[i];
                p[j] = x[j] + dj * hs[j];
                let v = f(&p);
                p[i] = x[i];
                p[j] = x[j];
                v
            };
            let pp = eval(1.0, 1.0);
            let pm = eval(1.0, -1.0);
            let mp = eval(-1.0, 1.0);
            let mm = eval(-1.0, -1.0);
            let v = (pp - pm - mp + mm) / (4.0 * hs[i] * hs[j]);
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (m[i][j] + m[j][i]);
            m[i][j] = avg;
            m[j][i] = avg;
        }
    }
    if m.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::numeric("numeric_hessian: non-finite entry", f0, f64::NAN));
    }
    Ok(m)
}
