use std::f64::consts::PI;

use ks2d::harness::config::{DataKind, ScaleTo};
use ks2d::harness::{run_scenario, Experiment, ScenarioConfig};
use ks2d::TorusSpec;

fn scenario(experiment: Experiment, domain: TorusSpec, dir: &std::path::Path) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::new(experiment, domain);
    cfg.initial_data.kind = DataKind::RandomEnvelope;
    cfg.initial_data.amplitude = 1.0;
    cfg.initial_data.spectral_exponent = 2.0;
    cfg.initial_data.seed = 3;
    cfg.initial_data.scale_to = Some(ScaleTo::L2(0.05));
    cfg.stepper.dt = 0.01;
    cfg.stepper.t_final = 0.1;
    cfg.outputs.dir = dir.to_path_buf();
    cfg
}

#[test]
fn complex_shift_levels_stay_bounded() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = scenario(Experiment::ComplexShift, TorusSpec::square(4.0 * PI, 16).unwrap(), dir.path());
    cfg.complex_shift.alpha_vec = [0.1, 0.05];
    cfg.complex_shift.levels = 6;
    let m = run_scenario(&cfg).unwrap();
    assert_eq!(m.exit_code, 0);
    assert!(m.verify_outputs());
    let levels = m.summary["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 6);
    assert!(m.summary["max_over_levels_per_data"].as_f64().unwrap() < 2.0);
}

#[test]
fn estimates_respect_the_analytic_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = scenario(Experiment::Estimates, TorusSpec::square(PI, 16).unwrap(), dir.path());
    cfg.alpha = 1.0;
    cfg.estimates.probes = 8;
    cfg.estimates.probe_span = 0.5;
    let m = run_scenario(&cfg).unwrap();
    assert_eq!(m.verdicts[0]["operator_bounds_hold"], true);
    assert_eq!(m.verdicts[0]["smoothing_bounds_hold"], true);
    let bound = m.summary["bound_i1"].as_f64().unwrap();
    assert!((bound - 2.0 / 11.0).abs() < 1e-14);
}

#[test]
fn simulate_with_a_cap_reports_continue() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = scenario(Experiment::Simulate, TorusSpec::square(4.0 * PI, 16).unwrap(), dir.path());
    cfg.m_cap = Some(0.1);
    let m = run_scenario(&cfg).unwrap();
    assert_eq!(m.verdicts[0]["verdict"], "CONTINUE");
    cfg.m_cap = Some(0.01);
    let m = run_scenario(&cfg).unwrap();
    assert_eq!(m.verdicts[0]["verdict"], "CAP_EXCEEDED");
}

#[test]
fn config_round_trips_through_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario(Experiment::Picard, TorusSpec::square(PI, 16).unwrap(), dir.path());
    let back = ScenarioConfig::from_json(&cfg.to_json().unwrap()).unwrap();
    assert_eq!(back, cfg);
}
