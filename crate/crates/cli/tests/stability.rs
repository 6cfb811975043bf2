//! The reference lift stands in for the exact group path, so fitted rates
//! carry a bias of the order of the reference mesh. These checks make sure
//! the bias is immaterial: refining the reference level by two leaves the
//! fitted slopes essentially unchanged.

use roughpath_cli::{run_experiment, ExperimentConfig};

#[test]
fn levy_rate_slope_is_stable_under_reference_refinement() {
    let slope_at = |ref_level: u32| {
        let mut cfg = ExperimentConfig::defaults("levyrate");
        cfg.ref_level = ref_level;
        cfg.levels = (4..=9).collect();
        cfg.replicates = 300;
        cfg.seed = 42;
        let report = run_experiment(&cfg).unwrap();
        report.fit("levy_sq_mean").unwrap().slope
    };
    let coarse = slope_at(12);
    let fine = slope_at(14);
    assert!(
        (coarse - fine).abs() <= 0.1,
        "slope moved from {coarse:.3} to {fine:.3} under reference refinement"
    );
}

#[test]
fn skeleton_discrepancy_shrinks_at_second_order() {
    // the two solvers approximate the same classical flow along a
    // finite-energy path; without drift the gap decays like the square of
    // the step (first-order drift handling caps the drifted variant at one)
    let mut cfg = ExperimentConfig::defaults("support");
    cfg.scenario = "driftless_circle".into();
    cfg.levels = vec![8, 10, 12];
    cfg.replicates = 10;
    cfg.seed = 42;
    let report = run_experiment(&cfg).unwrap();
    let fit = report.fit("skeleton_sup_err").unwrap();
    assert!(
        (fit.slope - 2.0).abs() <= 0.3,
        "expected near-second-order decay, got slope {:.3} (r2 {:.3})",
        fit.slope,
        fit.r2
    );
}

#[test]
fn wong_zakai_slope_is_stable_under_reference_refinement() {
    let slope_at = |ref_level: u32| {
        let mut cfg = ExperimentConfig::defaults("wz");
        cfg.ref_level = ref_level;
        cfg.levels = (5..=9).collect();
        cfg.replicates = 40;
        cfg.seed = 42;
        let report = run_experiment(&cfg).unwrap();
        report.fit("sup_dist").unwrap().slope
    };
    let coarse = slope_at(12);
    let fine = slope_at(14);
    assert!(
        (coarse - fine).abs() <= 0.12,
        "slope moved from {coarse:.3} to {fine:.3} under reference refinement"
    );
}
