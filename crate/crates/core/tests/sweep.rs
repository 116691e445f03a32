use aoci_core::exec::Execution;
use aoci_core::photometry::FluxMethod;
use aoci_core::sweep::*;
use aoci_core::validation::reference_config;
use aoci_core::Error;

fn spec(json: &str) -> SweepSpec {
    SweepSpec::from_json(json).unwrap()
}

fn rejected_at(json: &str) -> String {
    let s = spec(json);
    match s.validate(&reference_config()) {
        Err(Error::Config { path, .. }) => path,
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn invalid_axes_rejected() {
    assert_eq!(
        rejected_at(r#"{"axis1": {"path": "beam.sigma_s_mm", "values": []}, "metric": "mean_flux"}"#),
        "axis1.values"
    );
    assert_eq!(
        rejected_at(r#"{"axis1": {"path": "beam.sigma_s_mm", "values": [0.1, 0.3, 0.2]}, "metric": "mean_flux"}"#),
        "axis1.values"
    );
    assert_eq!(
        rejected_at(r#"{"axis1": {"path": "beam.sigma_s_mm", "values": [0.1, 0.1]}, "metric": "mean_flux"}"#),
        "axis1.values"
    );
    assert_eq!(
        rejected_at(r#"{"axis1": {"path": "beam.radius", "values": [1]}, "metric": "mean_flux"}"#),
        "axis1.path"
    );
    assert_eq!(
        rejected_at(
            r#"{"axis1": {"path": "skin.delta_mm", "values": [4]}, "axis2": {"path": "skin.delta_mm", "values": [5]}, "metric": "mean_flux"}"#
        ),
        "axis2.path"
    );
    assert_eq!(
        rejected_at(
            r#"{"axis1": {"path": "skin.delta_mm", "values": [4]}, "metric": "p_hearing", "mc": {"samples": 100, "seed": 1}}"#
        ),
        "mc.samples"
    );
    assert!(
        SweepSpec::from_json(r#"{"axis1": {"path": "skin.delta_mm", "values": [4]}, "metric": "loudness"}"#).is_err()
    );
}

#[test]
fn decreasing_axes_accepted() {
    let s = spec(r#"{"axis1": {"path": "skin.delta_mm", "values": [10, 8, 6]}, "metric": "mean_flux"}"#);
    assert!(s.validate(&reference_config()).is_ok());
}

#[test]
fn jitter_sweep_is_monotone() {
    let s =
        spec(r#"{"axis1": {"path": "beam.sigma_s_mm", "values": [0.01, 0.03, 0.1, 0.3, 1.0]}, "metric": "mean_flux"}"#);
    let r = run_sweep(&reference_config(), &s, false, Execution::default()).unwrap();
    assert_eq!(r.rows.len(), 5);
    let v: Vec<f64> = r.rows.iter().map(|row| row.outcome.as_ref().unwrap().value).collect();
    assert!(v.windows(2).all(|w| w[1] < w[0]), "{v:?}");
    assert!(r.rows.iter().all(|row| row.outcome.as_ref().unwrap().method == "quadrature"));
}

#[test]
fn grid_runs_axis1_outer() {
    let s = spec(
        r#"{"axis1": {"path": "skin.delta_mm", "values": [4, 6, 8]}, "axis2": {"path": "source.power_mw", "values": [10, 20]}, "metric": "link_budget"}"#,
    );
    let r = run_sweep(&reference_config(), &s, false, Execution::default()).unwrap();
    let coords: Vec<Vec<f64>> = r.rows.iter().map(|row| row.coords.clone()).collect();
    assert_eq!(coords, vec![vec![4., 10.], vec![4., 20.], vec![6., 10.], vec![6., 20.], vec![8., 10.], vec![8., 20.]]);
    for pair in r.rows.chunks(2) {
        let (a, b) = (pair[0].outcome.as_ref().unwrap().value, pair[1].outcome.as_ref().unwrap().value);
        let background = reference_config().neural.background_mean();
        assert!(((b - background) / (a - background) - 2.0).abs() < 1e-9);
    }
}

#[test]
fn point_failures_are_recorded_and_the_sweep_continues() {
    let s = spec(
        r#"{"axis1": {"path": "neural.y_th_photons", "values": [1e14, 1e16, 1e18]}, "metric": "p_false_hearing"}"#,
    );
    let r = run_sweep(&reference_config(), &s, false, Execution::default()).unwrap();
    assert!(r.rows[0].outcome.is_ok() && r.rows[1].outcome.is_ok());
    assert!(matches!(r.rows[2].outcome, Err(Error::Config { .. })));
    assert_eq!(r.failures().count(), 1);
}

#[test]
fn probability_metrics_carry_intervals_and_budget() {
    let s = spec(
        r#"{"axis1": {"path": "source.power_mw", "values": [5, 20]}, "metric": "p_hearing", "mc": {"samples": 20000, "seed": 8}}"#,
    );
    let r = run_sweep(&reference_config(), &s, false, Execution::default()).unwrap();
    for row in &r.rows {
        let m = row.outcome.as_ref().unwrap();
        assert_eq!((m.n_samples, m.seed, m.method), (Some(20000), Some(8), "mc"));
        assert!(m.extras[0] <= m.value && m.value <= m.extras[1]);
    }
}

#[test]
fn sweeps_are_identical_across_execution_modes() {
    let s = spec(
        r#"{"axis1": {"path": "beam.sigma_s_mm", "values": [0.05, 0.2]}, "axis2": {"path": "source.power_mw", "values": [10, 40]}, "metric": "p_damage"}"#,
    );
    let a = run_sweep(&reference_config(), &s, false, Execution::Sequential).unwrap();
    let b = run_sweep(&reference_config(), &s, false, Execution::Parallel).unwrap();
    let values = |r: &SweepResult| r.rows.iter().map(|row| row.outcome.clone().unwrap()).collect::<Vec<_>>();
    assert_eq!(values(&a), values(&b));
}

#[test]
fn metric_names_round_trip() {
    for m in [Metric::MeanFlux, Metric::PHearing, Metric::PFalseHearing, Metric::PDamage, Metric::LinkBudget] {
        let text = format!("\"{}\"", m.as_str());
        assert_eq!(serde_json::from_str::<Metric>(&text).unwrap(), m);
    }
    assert_eq!(serde_json::from_str::<FluxMethod>("\"mc\"").unwrap(), FluxMethod::MonteCarlo);
}
