use aoci_core::validation::*;

#[test]
fn quick_suite_passes() {
    let reports = run_all(&ValidateOptions { quick: true, ..ValidateOptions::default() });
    assert_eq!(reports.len(), CHECKS.len());
    for r in &reports {
        assert!(r.passed, "{}: {} > {} ({})", r.name, r.worst, r.limit, r.detail);
    }
}

#[test]
fn perturbation_is_caught() {
    let opts = ValidateOptions { quick: true, perturbation: 1e-4, ..ValidateOptions::default() };
    let failed: Vec<_> = run_all(&opts).into_iter().filter(|r| !r.passed).map(|r| r.name).collect();
    for name in
        ["coupling_closed_vs_integral", "mean_flux_three_way", "pointing_integral_identity", "poisson_identities"]
    {
        assert!(failed.contains(&name), "{name} not sensitive; failed: {failed:?}");
    }
}
