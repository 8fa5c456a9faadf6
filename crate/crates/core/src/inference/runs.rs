use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{ln_beta, reg_upper_gamma};

/// How the runs-test p-value is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum RunsMethod {
    /// Normal approximation to the number of runs, no continuity correction.
    #[default]
    Normal,
    /// Exact conditional distribution given the group sizes.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunsTestReport {
    pub n_runs_observed: usize,
    pub n_above: usize,
    pub n_below: usize,
    pub median: f64,
    pub pvalue: f64,
    pub method: RunsMethod,
}

fn median(data: &[f64]) -> f64 {
    let mut v = data.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Runs test for randomness about the sample median. Values equal to the
/// median are dropped.
pub fn runs_test(data: &[f64], method: RunsMethod) -> Result<RunsTestReport> {
    if data.len() < 2 {
        return Err(Error::Test("runs test needs at least 2 observations".into()));
    }
    let med = median(data);
    let signs: Vec<bool> = data.iter().filter(|&&x| x != med).map(|&x| x > med).collect();
    let n_above = signs.iter().filter(|&&s| s).count();
    let n_below = signs.len() - n_above;
    if n_above == 0 || n_below == 0 {
        return Err(Error::Test("runs test needs values on both sides of the median".into()));
    }
    let runs = 1 + signs.windows(2).filter(|w| w[0] != w[1]).count();
    let pvalue = match method {
        RunsMethod::Normal => normal_pvalue(runs, n_above, n_below),
        RunsMethod::Exact => exact_pvalue(runs, n_above, n_below),
    };
    Ok(RunsTestReport {
        n_runs_observed: runs,
        n_above,
        n_below,
        median: med,
        pvalue,
        method,
    })
}

fn normal_pvalue(runs: usize, n1: usize, n2: usize) -> f64 {
    let (a, b) = (n1 as f64, n2 as f64);
    let n = a + b;
    let mean = 2.0 * a * b / n + 1.0;
    let var = 2.0 * a * b * (2.0 * a * b - n) / (n * n * (n - 1.0));
    if !(var > 0.0) {
        return 1.0;
    }
    let z = (runs as f64 - mean) / var.sqrt();
    // Two-sided normal tail: erfc(|z| / √2) = Q(1/2, z² / 2).
    reg_upper_gamma(0.5, 0.5 * z * z).unwrap_or(1.0).min(1.0)
}

fn ln_choose(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if k == 0 || k == n {
        return 0.0;
    }
    -((n + 1) as f64).ln() - ln_beta((k + 1) as f64, (n - k + 1) as f64)
}

/// `P(R = r)` given `n1` and `n2`.
pub(crate) fn runs_pmf(r: usize, n1: usize, n2: usize) -> f64 {
    let total = ln_choose(n1 + n2, n1);
    let term = |a: usize, b: usize| {
        if a == usize::MAX || b == usize::MAX {
            0.0
        } else {
            (ln_choose(n1 - 1, a) + ln_choose(n2 - 1, b) - total).exp()
        }
    };
    if r < 2 {
        return 0.0;
    }
    let k = r / 2;
    if r.is_multiple_of(2) {
        2.0 * term(k - 1, k - 1)
    } else {
        term(k, k - 1) + term(k - 1, k)
    }
}

fn exact_pvalue(runs: usize, n1: usize, n2: usize) -> f64 {
    let max = 2 * n1.min(n2) + usize::from(n1 != n2);
    let lower: f64 = (2..=runs).map(|r| runs_pmf(r, n1, n2)).sum();
    let upper: f64 = (runs..=max).map(|r| runs_pmf(r, n1, n2)).sum();
    (2.0 * lower.min(upper)).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pmf_sums_to_one() {
        for (a, b) in [(1, 1), (3, 5), (10, 10), (7, 2)] {
            let s: f64 = (2..=a + b).map(|r| runs_pmf(r, a, b)).sum();
            assert!((s - 1.0).abs() < 1e-12, "{a},{b}: {s}");
        }
    }

    /// Enumerates every arrangement of five "above" and five "below" labels.
    #[test]
    fn exact_matches_enumeration() {
        let mut counts = [0usize; 11];
        let mut total = 0;
        for mask in 0u32..1024 {
            if mask.count_ones() != 5 {
                continue;
            }
            total += 1;
            let runs = 1 + (0..9).filter(|i| (mask >> i & 1) != (mask >> (i + 1) & 1)).count();
            counts[runs] += 1;
        }
        for r in 2..=10 {
            let p = runs_pmf(r, 5, 5);
            assert!((p - counts[r] as f64 / total as f64).abs() < 1e-14, "r={r}");
        }
        // Oracle two-sided p for every observable count.
        for r in 2..=10 {
            let lo: usize = counts[2..=r].iter().sum();
            let hi: usize = counts[r..].iter().sum();
            let want = (2.0 * lo.min(hi) as f64 / total as f64).min(1.0);
            assert!((exact_pvalue(r, 5, 5) - want).abs() < 1e-13);
        }
    }

    #[test]
    fn extreme_sequences() {
        let alt: Vec<f64> = (0..20).map(|i| if i % 2 == 0 { 0.9 } else { 0.1 }).collect();
        let blocks: Vec<f64> = (0..20).map(|i| if i < 10 { 0.9 } else { 0.1 }).collect();
        for m in [RunsMethod::Normal, RunsMethod::Exact] {
            let r = runs_test(&alt, m).unwrap();
            assert_eq!(r.n_runs_observed, 20);
            assert!(r.pvalue < 0.01);
            let r = runs_test(&blocks, m).unwrap();
            assert_eq!(r.n_runs_observed, 2);
            assert!(r.pvalue < 0.01);
        }
    }

    #[test]
    fn degenerate_inputs() {
        assert!(runs_test(&[0.5], RunsMethod::Normal).is_err());
        assert!(runs_test(&[0.5, 0.5, 0.5], RunsMethod::Normal).is_err());
    }
}
