use aoci_core::config::ConfigFile;
use aoci_core::validation::{reference_config, REFERENCE_CONFIG};
use aoci_core::{Error, LinkConfig};

fn config_error_path(text: &str) -> String {
    match LinkConfig::from_json(text) {
        Err(Error::Config { path, .. }) => path,
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn round_trip_is_identity() {
    let a = reference_config();
    let b = LinkConfig::from_json(&a.to_json()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.hash(), b.hash());
    let c = LinkConfig::from_json(&b.to_json()).unwrap();
    assert_eq!(b.to_json(), c.to_json());
}

#[test]
fn converts_to_si_once() {
    let c = reference_config();
    assert_eq!(c.source.power_tx, 40.0 * 1e-3);
    assert_eq!(c.source.lambda, 594.0 * 1e-9);
    assert_eq!(c.skin.delta, 6.0 * 1e-3);
    assert!((c.skin.mu_a - 18.6).abs() < 1e-12);
    assert_eq!(c.beam.sigma_s, 0.1 * 1e-3);
    assert_eq!(c.coupling.lambda, c.source.lambda);
    assert_eq!(c.safety.skin_mpe, 500.0 * 1e3);
    assert_eq!(c.safety.neuron_mpe, 75.0 * 1e3);
}

#[test]
fn invalid_fields_are_named() {
    let bad = |from: &str, to: &str| {
        assert!(REFERENCE_CONFIG.contains(from), "{from}");
        REFERENCE_CONFIG.replace(from, to)
    };
    assert_eq!(config_error_path(&bad("\"sigma_s_mm\": 0.1", "\"sigma_s_mm\": -0.1")), "beam.sigma_s_mm");
    assert_eq!(config_error_path(&bad("\"theta_deg\": 20.0", "\"theta_deg\": 190.0")), "beam.theta_deg");
    assert_eq!(config_error_path(&bad("\"d_th_photons\": 1.4984e17", "\"d_th_photons\": 1.0")), "neural.d_th_photons");
    assert_eq!(config_error_path(&bad("\"samples\": 100000", "\"samples\": 10")), "monte_carlo.samples");
    let unknown = bad("\"lambda_nm\": 594.0 }", "\"lambda_nm\": 594.0, \"colour\": 1 }");
    assert!(config_error_path(&unknown).starts_with("line "));
}

#[test]
fn mismatched_coupling_wavelength_rejected() {
    let mut file = ConfigFile::from_json(REFERENCE_CONFIG).unwrap();
    file.coupling.lambda_nm = Some(600.0);
    assert!(
        matches!(LinkConfig::from_file(file.clone()), Err(Error::Config { path, .. }) if path == "coupling.lambda_nm")
    );
    file.coupling.lambda_nm = Some(594.0);
    assert!(LinkConfig::from_file(file).is_ok());
}

#[test]
fn out_of_range_values_warn() {
    let c = reference_config().with_value("skin.delta_mm", 30.0).unwrap();
    assert!(c.warnings.iter().any(|w| w.contains("skin.delta_mm")));
    assert!(reference_config().warnings.is_empty());
}

#[test]
fn with_value_edits_and_revalidates() {
    let base = reference_config();
    let c = base.with_value("beam.sigma_s_mm", 0.5).unwrap();
    assert_eq!(c.beam.sigma_s, 0.5e-3);
    assert_eq!(c.get("beam.sigma_s_mm").unwrap(), 0.5);
    assert_ne!(c.hash(), base.hash());
    assert_eq!(base.with_value("fiber.n_fbg", 3.0).unwrap().fiber.n_fbg, 3);
    assert!(base.with_value("fiber.n_fbg", 2.5).is_err());
    assert!(base.with_value("beam.sigma_s_mm", -1.0).is_err());
    assert!(base.with_value("beam.nonexistent", 1.0).is_err());
    assert!(base.with_value("beam", 1.0).is_err());
    assert!(base.get("beam").is_err());
}

#[test]
fn with_mc_overrides_budget() {
    let c = reference_config().with_mc(250_000, 99).unwrap();
    assert_eq!((c.mc.samples, c.mc.seed), (250_000, 99));
    let d = c.with_value("source.power_mw", 10.0).unwrap();
    assert_eq!((d.mc.samples, d.mc.seed), (250_000, 99));
}
