use aoci_core::channel::*;
use aoci_core::specfun::{integrate_semi_infinite, QuadControl};
use proptest::prelude::*;

fn geometry(theta_deg: f64, beta_mm: f64, sigma_mm: f64) -> BeamGeometry {
    BeamGeometry { theta: theta_deg.to_radians(), beta: beta_mm * 1e-3, sigma_s: sigma_mm * 1e-3 }
}

#[test]
fn rayleigh_pdf_integrates_to_one() {
    for &s in &[1e-6, 1e-4, 1e-3] {
        let q = integrate_semi_infinite(|r| rayleigh_pdf(s, r).unwrap(), s, &QuadControl::default()).unwrap();
        assert!((q.value - 1.0).abs() < 1e-10, "sigma {s}: {}", q.value);
    }
    assert!(rayleigh_pdf(0.0, 1e-4).is_err());
    assert!(rayleigh_pdf(1e-4, -1.0).is_err());
}

#[test]
fn pointing_integral_matches_closed_form() {
    let ctl = QuadControl { rel_tol: 1e-12, ..QuadControl::default() };
    for &(theta, beta, sigma, delta) in
        &[(20.0, 2.0, 0.1, 6e-3), (5.0, 1.0, 0.5, 4e-3), (30.0, 3.0, 1.0, 10e-3), (10.0, 0.5, 0.01, 8e-3)]
    {
        let g = geometry(theta, beta, sigma);
        let b = beam_stats(&g, delta);
        let q = integrate_semi_infinite(|r| b.pointing_gain(r) * rayleigh_pdf(g.sigma_s, r).unwrap(), g.sigma_s, &ctl)
            .unwrap();
        let closed = b.mean_pointing_gain(g.sigma_s);
        assert!(((q.value - closed) / closed).abs() < 1e-8, "{theta} {beta} {sigma}: {} vs {closed}", q.value);
    }
}

#[test]
fn beam_radius_scales_with_thickness() {
    let g = geometry(20.0, 2.0, 0.1);
    let (a, b) = (beam_stats(&g, 4e-3), beam_stats(&g, 8e-3));
    assert!((b.w_delta / a.w_delta - 2.0).abs() < 1e-14);
    assert!(b.a0 < a.a0);
}

proptest! {
    // every length scaled by the same factor leaves the dimensionless
    // quantities unchanged
    #[test]
    fn geometry_is_unit_free(theta in 5.0f64..30.0, beta in 0.5f64..3.0, delta in 4e-3f64..1e-2, r in 0.0f64..2e-3, k in 1e-3f64..1e3) {
        let g = geometry(theta, beta, 0.1);
        let gk = BeamGeometry { beta: g.beta * k, ..g };
        let (a, b) = (beam_stats(&g, delta), beam_stats(&gk, delta * k));
        prop_assert!((a.upsilon - b.upsilon).abs() <= 1e-12 * a.upsilon);
        prop_assert!((a.a0 - b.a0).abs() <= 1e-14);
        prop_assert!((a.pointing_gain(r) - b.pointing_gain(r * k)).abs() <= 1e-12);
    }

    #[test]
    fn pointing_gain_bounded_and_decreasing(theta in 5.0f64..30.0, beta in 0.5f64..3.0, delta in 4e-3f64..1e-2, r in 0.0f64..5e-3, dr in 1e-6f64..1e-3) {
        let b = beam_stats(&geometry(theta, beta, 0.1), delta);
        let (h0, h1) = (b.pointing_gain(r), b.pointing_gain(r + dr));
        prop_assert!((0.0..=1.0).contains(&h0));
        prop_assert!(h1 <= h0);
    }

    #[test]
    fn path_gain_multiplies_over_layers(d1 in 0.0f64..5e-3, d2 in 0.0f64..5e-3, mu in 0.0f64..500.0) {
        let g = |d| path_gain(&SkinParams { delta: d, mu_a: mu, mu_s: 0.5 * mu });
        prop_assert!((g(d1 + d2) - g(d1) * g(d2)).abs() <= 1e-14);
    }
}
