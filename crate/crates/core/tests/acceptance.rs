//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_GAPS` are reported as FAIL when they fail but do
//! not fail the process; every other criterion must pass.

use std::time::Instant;

use rand_distr::Distribution;
use unitchart::charts::{ewma_limits, shewhart_limits, Chart};
use unitchart::datasets::{peanut_phase1, peanut_phase2};
use unitchart::inference::{fit_mle, ks_test, phase1_analysis, AdMethod, Phase1Options};
use unitchart::models::{Family, UnitModel};
use unitchart::numerics::{quad, Tolerance};
use unitchart::simulation::cases::{case_models, MU0};
use unitchart::simulation::{
    calibrate_l, estimate_rl, ooc_profile, p_out, run_lengths, shewhart_rl_exact, substream, summarize,
    with_threads, DesignConfig, ShiftPoint, ShiftProfile,
};

/// Criteria that cannot be met as stated, with the reason.
const KNOWN_GAPS: &[(u32, &str)] = &[
    (
        4,
        "published out-of-control EWMA ARLs and MRLs exceed the count-until-signal run length by exactly one \
         (an independent Markov-chain ARL agrees with the simulation, e.g. 4.03 at mu1=0.12)",
    ),
    (
        5,
        "the published 564.09 does not follow from the printed Unit Gamma limits (0.1897, 0.2103): \
         a Markov-chain ARL for Beta(0.2, 290) data on them is about 690",
    ),
    (6, "the published Beta KS statistic 0.1624 is not the KS distance at the Beta MLE (0.1606)"),
];

const CAL_SEED: u64 = 20_240_501;
const EVAL_SEED: u64 = 20_240_502;
const VERIFY_SEED: u64 = 20_240_503;

struct Outcome {
    pass: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { pass: true, lines: Vec::new() }
    }

    fn check(&mut self, ok: bool, msg: String) {
        if !ok {
            self.pass = false;
            self.lines.push(format!("    miss: {msg}"));
        }
    }

    fn note(&mut self, msg: String) {
        self.lines.push(format!("    {msg}"));
    }
}

fn tight() -> Tolerance {
    Tolerance::new(1e-13, 1e-12, 2000).unwrap()
}

fn cfg(seed: u64) -> DesignConfig {
    DesignConfig { seed, ..DesignConfig::default() }
}

// Reference (sd, cv) per case, family order Beta, Simplex, Unit Gamma.
const TABLE3: [[(f64, f64); 4]; 3] = [
    [(0.02344842, 0.1172421), (0.03276928, 0.1638464), (0.04444444, 0.2222222), (0.07071068, 0.3535534)],
    [(0.02355733, 0.1177866), (0.03170082, 0.1585041), (0.04460488, 0.2230244), (0.07309293, 0.3654647)],
    [(0.02582828, 0.1291414), (0.03279827, 0.1639913), (0.04493217, 0.2246609), (0.07138937, 0.3569468)],
];

fn criterion1() -> Outcome {
    let mut out = Outcome::new();
    let mut worst: f64 = 0.0;
    for k in 1..=4 {
        for (fi, model) in case_models(k).unwrap().iter().enumerate() {
            let (sd, cv) = TABLE3[fi][k - 1];
            let tol = if model.family() == Family::Simplex { 2e-5 } else { 1e-6 };
            let r = model.moment_report().unwrap();
            let e = (r.std_dev - sd).abs().max((r.cv - cv).abs());
            worst = worst.max(e / tol);
            out.check(e <= tol, format!("{model}: sd {:.8} cv {:.7} vs {sd} {cv}", r.std_dev, r.cv));
        }
    }
    out.note(format!("worst error / tolerance = {worst:.3}"));
    out
}

// Shewhart ARL columns at mu1 = 0.12, 0.14, ..., 0.28, per case.
const SH_BETA: [[f64; 9]; 4] = [
    [1.26, 2.34, 8.04, 54.60, 370.37, 69.71, 12.26, 3.71, 1.78],
    [2.36, 5.72, 20.11, 100.51, 370.37, 129.21, 32.24, 10.61, 4.53],
    [5.11, 12.99, 40.85, 150.86, 370.37, 195.11, 67.47, 26.33, 11.93],
    [15.68, 36.30, 90.21, 220.61, 370.37, 289.82, 155.75, 81.39, 44.63],
];
const SH_SIMPLEX: [[f64; 9]; 4] = [
    [1.09, 2.15, 9.34, 70.24, 370.46, 55.04, 10.52, 3.71, 1.98],
    [1.87, 5.72, 24.83, 128.23, 370.48, 90.00, 21.68, 7.94, 3.94],
    [5.94, 19.22, 64.92, 213.70, 370.35, 135.09, 42.76, 17.56, 8.93],
    [35.02, 80.59, 173.86, 332.35, 370.40, 191.01, 84.09, 41.59, 23.42],
];
const SH_UNIT_GAMMA: [[f64; 9]; 4] = [
    [1.40, 2.85, 10.00, 63.21, 370.30, 90.28, 17.82, 5.36, 2.36],
    [2.23, 5.36, 18.84, 95.63, 370.37, 138.59, 35.74, 11.80, 4.97],
    [4.85, 12.31, 38.78, 144.77, 370.37, 213.14, 78.28, 31.52, 14.37],
    [14.82, 34.21, 85.15, 210.67, 370.37, 316.76, 184.20, 102.06, 58.31],
];

fn criterion2() -> Outcome {
    let mut out = Outcome::new();
    let start = Instant::now();
    let profile = ShiftProfile::standard(MU0).unwrap();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for k in 1..=4 {
        for (fi, model) in case_models(k).unwrap().iter().enumerate() {
            let table = [&SH_BETA, &SH_SIMPLEX, &SH_UNIT_GAMMA][fi][k - 1];
            let chart = shewhart_limits(model, 0.0027).unwrap();
            for (mu1, want) in profile.means().into_iter().zip(table) {
                let p = p_out(&model.with_mean(mu1).unwrap(), chart.lcl, chart.ucl).unwrap();
                let arl = shewhart_rl_exact(p).unwrap().arl;
                let rel = (arl / want - 1.0).abs();
                worst = worst.max(rel);
                count += 1;
                out.check(rel <= 0.01, format!("{model} mu1={mu1}: {arl:.2} vs {want}"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    out.check(secs < 5.0, format!("runtime {secs:.2}s exceeds 5s"));
    out.note(format!("{count} entries, worst relative error {:.3}%, {secs:.2}s", 100.0 * worst));
    out
}

fn criterion3() -> Outcome {
    let mut out = Outcome::new();
    // (family, case, lambda, published L)
    let cells = [
        (Family::Beta, 1, 0.05, 2.481),
        (Family::Beta, 2, 0.10, 2.693),
        (Family::Beta, 4, 0.20, 2.884),
        (Family::Simplex, 1, 0.05, 2.491),
        (Family::Simplex, 3, 0.10, 2.703),
        (Family::Simplex, 4, 0.20, 2.977),
        (Family::UnitGamma, 1, 0.20, 2.864),
        (Family::UnitGamma, 2, 0.10, 2.701),
        (Family::UnitGamma, 4, 0.05, 2.487),
    ];
    let mut within = 0;
    for (family, k, lambda, want) in cells {
        let start = Instant::now();
        let model = case_models(k).unwrap()[family as usize];
        let cal = calibrate_l(&model, lambda, &cfg(CAL_SEED)).unwrap();
        let verify = DesignConfig { n_runs: 100_000, ..cfg(VERIFY_SEED) };
        let v = estimate_rl(&Chart::Ewma(cal.chart), &model, &verify).unwrap();
        let close = (cal.l - want).abs() <= 0.03;
        within += usize::from(close);
        out.check((v.arl - 370.4).abs() <= 12.0, format!("{model} λ={lambda}: verification ARL {:.2}", v.arl));
        out.note(format!(
            "{model} λ={lambda}: L={:.3} (published {want}, {}) verify ARL {:.2} ± {:.2}, {:.1}s",
            cal.l,
            if close { "ok" } else { "off" },
            v.arl,
            v.se_arl,
            start.elapsed().as_secs_f64()
        ));
    }
    out.check(within >= 6, format!("only {within} of {} cells within ±0.03", cells.len()));
    out.note(format!("{within} of {} cells within ±0.03", cells.len()));
    out
}

fn compare_profile(out: &mut Outcome, label: &str, model: &UnitModel, lambda: f64, arls: [f64; 9], mrls: [f64; 9]) {
    let cal = calibrate_l(model, lambda, &cfg(CAL_SEED)).unwrap();
    let profile = ShiftProfile::standard(MU0).unwrap();
    let points = ooc_profile(&Chart::Ewma(cal.chart), model, &profile, &cfg(EVAL_SEED)).unwrap();
    // `offset` is added to shifted-row run lengths before comparing.
    let matches = |offset: f64, p: &ShiftPoint, want_arl: f64, want_mrl: f64| {
        let s = &p.summary;
        if (p.mu1 - MU0).abs() < 1e-12 {
            return (s.arl / want_arl - 1.0).abs() <= 0.10 && (s.mrl / want_mrl - 1.0).abs() <= 0.10;
        }
        (s.arl + offset - want_arl).abs() <= (3.0 * s.se_arl).max(0.05 * want_arl)
            && (s.mrl + offset - want_mrl).abs() <= 2.0
    };
    let mut shifted_ok = 0;
    for (p, (&want_arl, &want_mrl)) in points.iter().zip(arls.iter().zip(&mrls)) {
        let s = &p.summary;
        out.check(
            matches(0.0, p, want_arl, want_mrl),
            format!("{label} mu1={}: ARL {:.2} MRL {} vs {want_arl} {want_mrl}", p.mu1, s.arl, s.mrl),
        );
        shifted_ok += usize::from(matches(1.0, p, want_arl, want_mrl));
    }
    out.note(format!("{label}: counting the signalling point plus one, {shifted_ok} of 9 rows match"));
    out.note(format!(
        "{label}: L={:.3}, ARLs {:?}",
        cal.l,
        points.iter().map(|p| (p.summary.arl * 100.0).round() / 100.0).collect::<Vec<_>>()
    ));
}

fn criterion4() -> Outcome {
    let mut out = Outcome::new();
    compare_profile(
        &mut out,
        "Beta phi=148 λ=0.05",
        &UnitModel::new(Family::Beta, MU0, 148.0).unwrap(),
        0.05,
        [5.04, 6.42, 9.46, 21.09, 370.14, 21.05, 9.55, 6.47, 5.09],
        [5.0, 6.0, 9.0, 19.0, 265.0, 19.0, 9.0, 6.0, 5.0],
    );
    compare_profile(
        &mut out,
        "UnitGamma tau=51 λ=0.10",
        &UnitModel::new(Family::UnitGamma, MU0, 51.0).unwrap(),
        0.10,
        [5.67, 7.57, 12.41, 37.36, 370.64, 34.10, 12.48, 7.73, 5.80],
        [5.0, 7.0, 11.0, 30.0, 260.0, 27.0, 11.0, 7.0, 6.0],
    );
    out
}

fn criterion5() -> Outcome {
    let mut out = Outcome::new();
    let [beta, _, unit_gamma] = case_models(1).unwrap();
    let cal = calibrate_l(&unit_gamma, 0.05, &cfg(CAL_SEED)).unwrap();
    let s = estimate_rl(&Chart::Ewma(cal.chart), &beta, &cfg(EVAL_SEED)).unwrap();
    out.check((s.arl / 564.09 - 1.0).abs() <= 0.10, format!("Beta-true, Unit Gamma limits: ARL {:.2} vs 564.09", s.arl));
    out.note(format!("Case 1 Beta-true, Unit Gamma limits (L={:.3}), IC: ARL {:.2} (published 564.09)", cal.l, s.arl));

    let simplex4 = case_models(4).unwrap()[1];
    let cal = calibrate_l(&simplex4, 0.20, &cfg(CAL_SEED)).unwrap();
    let chart = Chart::Ewma(cal.chart);
    let shifted = estimate_rl(&chart, &simplex4.with_mean(0.18).unwrap(), &cfg(EVAL_SEED)).unwrap();
    let ic = estimate_rl(&chart, &simplex4, &cfg(EVAL_SEED)).unwrap();
    out.check(
        (shifted.arl / 546.56 - 1.0).abs() <= 0.10,
        format!("Case 4 Simplex-true mu1=0.18: ARL {:.2} vs 546.56", shifted.arl),
    );
    out.check(shifted.arl > ic.arl, format!("ARL at mu1=0.18 ({:.2}) does not exceed IC ({:.2})", shifted.arl, ic.arl));
    out.note(format!(
        "Case 4 Simplex-true λ=0.20 (L={:.3}): mu1=0.18 ARL {:.2} (published 546.56), IC ARL {:.2}",
        cal.l, shifted.arl, ic.arl
    ));
    let published = Chart::Ewma(ewma_limits(&simplex4, 0.20, 2.977).unwrap());
    let at_published = estimate_rl(&published, &simplex4.with_mean(0.18).unwrap(), &cfg(EVAL_SEED)).unwrap();
    let ic_published = estimate_rl(&published, &simplex4, &cfg(EVAL_SEED)).unwrap();
    out.note(format!(
        "  with the published L=2.977 instead: mu1=0.18 ARL {:.2}, IC ARL {:.2}",
        at_published.arl, ic_published.arl
    ));
    out
}

fn criterion6() -> Outcome {
    let mut out = Outcome::new();
    let report = phase1_analysis(
        &peanut_phase1(),
        &Phase1Options { ad_method: AdMethod::Asymptotic, ..Phase1Options::default() },
    )
    .unwrap();
    // (family, mu, dispersion, aic, bic, ad, ks)
    let table16 = [
        (Family::Beta, 0.9533, 48.9438, -85.455, -83.464, 0.4970, 0.1624),
        (Family::Simplex, 0.9534, 3.5742, -88.653, -86.662, 0.2397, 0.1310),
        (Family::UnitGamma, 0.9534, 2.2798, -85.455, -83.463, 0.4966, 0.1603),
    ];
    for (family, mu, d, aic, bic, ad, ks) in table16 {
        let a = report.families.iter().find(|a| a.fit.family == family).unwrap();
        let [m, disp] = a.fit.estimates;
        out.check((m - mu).abs() <= 1e-3, format!("{family} mu {m:.5} vs {mu}"));
        out.check((disp / d - 1.0).abs() <= 0.005, format!("{family} dispersion {disp:.5} vs {d}"));
        out.check((a.fit.aic - aic).abs() <= 0.02, format!("{family} AIC {:.4} vs {aic}", a.fit.aic));
        out.check((a.fit.bic - bic).abs() <= 0.02, format!("{family} BIC {:.4} vs {bic}", a.fit.bic));
        out.check((a.gof.ad_stat - ad).abs() <= 1e-3, format!("{family} AD {:.4} vs {ad}", a.gof.ad_stat));
        out.check((a.gof.ks_stat - ks).abs() <= 1e-3, format!("{family} KS {:.4} vs {ks}", a.gof.ks_stat));
        out.note(format!(
            "{family}: mu {m:.5} disp {disp:.5} AIC {:.3} BIC {:.3} AD {:.4} KS {:.4}",
            a.fit.aic, a.fit.bic, a.gof.ad_stat, a.gof.ks_stat
        ));
    }
    out.check((report.runs.pvalue - 0.3581).abs() <= 5e-4, format!("runs p {:.4}", report.runs.pvalue));
    out.check(report.best().fit.family == Family::Simplex, format!("best model {}", report.best().fit.family));
    out.note(format!("runs test p {:.4}; best by AIC: {}", report.runs.pvalue, report.best().fit.family));

    // Where the Beta KS gap comes from: the published value is matched by a
    // slightly different mean, not by the likelihood optimum.
    let beta = fit_mle(Family::Beta, &peanut_phase1()).unwrap();
    let alt = UnitModel::new(Family::Beta, 0.9533, beta.estimates[1]).unwrap();
    out.note(format!(
        "Beta KS at the MLE {:.4}; at mu=0.9533 (published rounding) {:.4}",
        ks_test(&peanut_phase1(), &beta.model().unwrap()).unwrap().stat,
        ks_test(&peanut_phase1(), &alt).unwrap().stat
    ));
    out
}

fn criterion7() -> Outcome {
    let mut out = Outcome::new();
    let phase1 = peanut_phase1();
    let phase2 = peanut_phase2();
    let model = fit_mle(Family::Simplex, &phase1).unwrap().model().unwrap();
    let sh = shewhart_limits(&model, 0.0027).unwrap();
    out.check(
        (sh.lcl - 0.7794).abs() <= 5e-4 && (sh.ucl - 0.9936).abs() <= 5e-4,
        format!("Shewhart limits ({:.4}, {:.4})", sh.lcl, sh.ucl),
    );
    let sh_chart = Chart::Shewhart(sh);
    let p1 = sh_chart.monitor(&phase1, false).unwrap();
    out.check(!p1.signaled, format!("Phase I Shewhart signal at {:?}", p1.signal_index));
    let p2 = sh_chart.monitor(&phase2, false).unwrap();
    out.check(p2.signal_index == Some(12), format!("Shewhart Phase II signal {:?}", p2.signal_index));
    let mut indices = vec![p2.signal_index];
    for (lambda, want) in [(0.05, 5), (0.10, 5), (0.20, 4)] {
        let cal = calibrate_l(&model, lambda, &cfg(CAL_SEED)).unwrap();
        let chart = Chart::Ewma(cal.chart);
        let p1 = chart.monitor(&phase1, false).unwrap();
        out.check(!p1.signaled, format!("Phase I EWMA λ={lambda} signal at {:?}", p1.signal_index));
        let r = chart.monitor(&phase2, false).unwrap();
        out.check(r.signal_index == Some(want), format!("EWMA λ={lambda} (L={:.3}) signal {:?}", cal.l, r.signal_index));
        indices.push(r.signal_index);
    }
    out.note(format!("limits ({:.4}, {:.4}); Phase II signals {:?}", sh.lcl, sh.ucl, indices));
    out
}

fn criterion8() -> Outcome {
    let mut out = Outcome::new();
    let models: Vec<UnitModel> = (1..=4).flat_map(|k| case_models(k).unwrap()).collect();

    for m in &models {
        let total = quad(|x| m.pdf(x).unwrap(), 0.0, 1.0, tight()).unwrap();
        out.check((total - 1.0).abs() <= 1e-8, format!("{m}: density integrates to {total}"));
        for p in [1e-4, 0.00135, 0.1, 0.5, 0.9, 0.99865, 1.0 - 1e-4] {
            let back = m.cdf(m.quantile(p).unwrap()).unwrap();
            out.check((back - p).abs() <= 1e-7, format!("{m}: cdf(quantile({p})) = {back}"));
        }
    }
    out.note("normalization and cdf/quantile round trips on all 12 case models".into());

    let series: Vec<f64> = (0..200).map(|i| 0.05 + 0.9 * ((i * 37 % 101) as f64 / 101.0)).collect();
    let chart = Chart::Ewma(ewma_limits(&models[0], 1.0, 3.0).unwrap());
    let path = chart.monitor(&series, false).unwrap().statistic_path;
    out.check(path == series, "λ=1 EWMA path differs from the series".into());

    for m in [&models[1], &models[5], &models[11]] {
        let sh = shewhart_limits(m, 0.0027).unwrap();
        let exact = shewhart_rl_exact(p_out(m, sh.lcl, sh.ucl).unwrap()).unwrap();
        let config = DesignConfig { n_runs: 100_000, ..cfg(VERIFY_SEED) };
        let s = estimate_rl(&Chart::Shewhart(sh), m, &config).unwrap();
        out.check(
            (s.arl - exact.arl).abs() <= 3.0 * s.se_arl && (s.mrl - exact.mrl).abs() <= 1.0 + 1e-9,
            format!("{m}: simulated ARL {:.2} MRL {} vs geometric {:.2} {}", s.arl, s.mrl, exact.arl, exact.mrl),
        );
        out.note(format!("{m}: Shewhart ARL {:.2} ± {:.2} vs geometric {:.2}", s.arl, s.se_arl, exact.arl));
    }

    // One-sample KS of 5000 draws per model; 1% family-wise level across the 12 models.
    for (i, m) in models.iter().enumerate() {
        let sampler = m.sampler().unwrap();
        let mut rng = substream(77, i as u64);
        let draws: Vec<f64> = (0..5000).map(|_| sampler.sample(&mut rng)).collect();
        let r = ks_test(&draws, m).unwrap();
        out.check(r.pvalue > 0.01 / models.len() as f64, format!("{m}: sampler KS p {:.4}", r.pvalue));
    }
    out.note("sampler KS checks on all 12 case models".into());

    let m = models[6];
    let chart = Chart::Ewma(ewma_limits(&m, 0.1, 2.7).unwrap());
    let one = with_threads(1, || run_lengths(&chart, &m, 2000, 5, 5_000_000).unwrap()).unwrap();
    let four = with_threads(4, || run_lengths(&chart, &m, 2000, 5, 5_000_000).unwrap()).unwrap();
    out.check(one == four, "run lengths differ between 1 and 4 workers".into());
    out.check(summarize(&one).unwrap() == summarize(&four).unwrap(), "summaries differ across workers".into());
    let c1 = with_threads(1, || calibrate_l(&m, 0.1, &DesignConfig { n_runs: 1000, xi: 30.0, ..cfg(9) }).unwrap()).unwrap();
    let c4 = with_threads(4, || calibrate_l(&m, 0.1, &DesignConfig { n_runs: 1000, xi: 30.0, ..cfg(9) }).unwrap()).unwrap();
    out.check(c1 == c4, "calibration differs between 1 and 4 workers".into());
    out.note("worker-count invariance (1 vs 4 workers): run lengths, summaries, calibration".into());
    out
}

type Criterion = (u32, &'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        (1, "reference-model standard deviations and CVs", criterion1),
        (2, "Shewhart ARL columns (analytic)", criterion2),
        (3, "calibrated L values and verification ARLs", criterion3),
        (4, "EWMA out-of-control profiles", criterion4),
        (5, "robustness spot checks", criterion5),
        (6, "Phase I fits, goodness of fit, runs test", criterion6),
        (7, "Phase I limits and Phase II signals", criterion7),
        (8, "property suite", criterion8),
    ];
    let filter: Option<u32> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut unexpected = Vec::new();
    for (id, name, run) in criteria {
        if filter.is_some_and(|f| f != id) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        println!("criterion {id} [{status}] {name} ({:.1}s)", start.elapsed().as_secs_f64());
        for line in &outcome.lines {
            println!("{line}");
        }
        if !outcome.pass {
            match KNOWN_GAPS.iter().find(|g| g.0 == id) {
                Some((_, why)) => println!("    known gap: {why}"),
                None => unexpected.push(id),
            }
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
