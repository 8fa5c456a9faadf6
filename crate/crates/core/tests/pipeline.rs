use unitchart::charts::{ewma_limits, shewhart_limits, Chart};
use unitchart::datasets::{peanut_phase1, peanut_phase2};
use unitchart::inference::{phase1_analysis, AdMethod, Phase1Options};
use unitchart::models::{Family, UnitModel};
use unitchart::simulation::cases::case_models;
use unitchart::simulation::{
    calibrate_l, estimate_rl, ooc_profile, robustness_matrix, DesignConfig, ShiftProfile,
};

fn cfg(n_runs: usize, seed: u64) -> DesignConfig {
    DesignConfig { n_runs, seed, ..DesignConfig::default() }
}

#[test]
fn phase1_then_phase2() {
    let report = phase1_analysis(
        &peanut_phase1(),
        &Phase1Options { ad_method: AdMethod::Asymptotic, ..Phase1Options::default() },
    )
    .unwrap();
    let best = report.best();
    assert_eq!(best.fit.family, Family::Simplex);
    let model = best.fit.model().unwrap();

    let sh = Chart::Shewhart(shewhart_limits(&model, 0.0027).unwrap());
    assert!(!sh.monitor(&peanut_phase1(), false).unwrap().signaled);
    assert_eq!(sh.monitor(&peanut_phase2(), false).unwrap().signal_index, Some(12));

    let cal = calibrate_l(&model, 0.2, &cfg(4000, 11)).unwrap();
    let ewma = Chart::Ewma(cal.chart);
    assert!(!ewma.monitor(&peanut_phase1(), false).unwrap().signaled);
    let p2 = ewma.monitor(&peanut_phase2(), true).unwrap();
    assert_eq!(p2.signal_index, Some(4));
    assert_eq!(p2.statistic_path.len(), 4, "early exit stops at the signal");
}

#[test]
fn simulation_is_deterministic_given_seed() {
    let model = UnitModel::new(Family::Simplex, 0.2, 0.5).unwrap();
    let a = calibrate_l(&model, 0.1, &cfg(2000, 42)).unwrap();
    let b = calibrate_l(&model, 0.1, &cfg(2000, 42)).unwrap();
    assert_eq!(a, b);
    let c = calibrate_l(&model, 0.1, &cfg(2000, 43)).unwrap();
    assert_ne!(a.achieved, c.achieved);

    let profile = ShiftProfile::standard(0.2).unwrap();
    let chart = Chart::Ewma(a.chart);
    assert_eq!(
        ooc_profile(&chart, &model, &profile, &cfg(1000, 7)).unwrap(),
        ooc_profile(&chart, &model, &profile, &cfg(1000, 7)).unwrap()
    );
}

#[test]
fn calibrated_in_control_arl_is_in_band() {
    let model = UnitModel::new(Family::Beta, 0.2, 148.0).unwrap();
    let config = cfg(5000, 3);
    let cal = calibrate_l(&model, 0.1, &config).unwrap();
    assert!((cal.achieved.arl - config.arl0).abs() < config.xi);
    // Re-estimating at the calibration seed reproduces the achieved summary.
    assert_eq!(estimate_rl(&Chart::Ewma(cal.chart), &model, &config).unwrap(), cal.achieved);
}

#[test]
fn robustness_diagonal_equals_direct_profile() {
    let models = case_models(2).unwrap();
    let profile = ShiftProfile::new(0.2, vec![-0.04, 0.0, 0.04]).unwrap();
    let config = cfg(800, 9);
    let study = robustness_matrix(&models, 0.2, &profile, &config).unwrap();
    assert_eq!(study.cells.len(), 9);
    for (i, m) in models.iter().enumerate() {
        let cell = &study.cells[4 * i];
        assert_eq!(cell.true_model, *m);
        assert_eq!(cell.limits_model, *m);
        let direct = ooc_profile(&Chart::Ewma(study.calibrations[i].chart), m, &profile, &config).unwrap();
        assert_eq!(cell.profile, direct);
        assert_eq!(cell.summary, direct[1].summary);
    }
}

#[test]
fn larger_shifts_signal_sooner() {
    let model = case_models(3).unwrap()[2];
    let chart = Chart::Ewma(ewma_limits(&model, 0.1, 2.7).unwrap());
    let profile = ShiftProfile::new(0.2, vec![0.02, 0.04, 0.08]).unwrap();
    let arls: Vec<f64> = ooc_profile(&chart, &model, &profile, &cfg(3000, 1))
        .unwrap()
        .iter()
        .map(|p| p.summary.arl)
        .collect();
    assert!(arls.windows(2).all(|w| w[0] > w[1]), "{arls:?}");
}
