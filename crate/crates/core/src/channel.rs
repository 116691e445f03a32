//! Transdermal path: Beer–Lambert attenuation through the skin and the
//! Gaussian-beam geometric spread at a misaligned circular aperture.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::specfun::erf;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkinParams {
    /// Skin thickness, m.
    pub delta: f64,
    /// Attenuation coefficient, 1/m.
    pub mu_a: f64,
    /// Scattering coefficient, 1/m.
    pub mu_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamGeometry {
    /// Full divergence angle of the source, rad.
    pub theta: f64,
    /// Receiver aperture radius, m.
    pub beta: f64,
    /// Pointing-error standard deviation (Rayleigh scale), m.
    pub sigma_s: f64,
}

/// Beam quantities at the receiver plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamStats {
    /// Beam radius after the skin, m.
    pub w_delta: f64,
    /// Aperture-to-beam ratio `√π β / (√2 w_δ)`.
    pub upsilon: f64,
    /// Equivalent beam width, m.
    pub w_eq: f64,
    /// Fraction collected with perfect alignment.
    pub a0: f64,
}

pub fn path_gain(skin: &SkinParams) -> f64 {
    (-(skin.mu_a + skin.mu_s) * skin.delta).exp()
}

pub fn beam_stats(geom: &BeamGeometry, delta: f64) -> BeamStats {
    let w_delta = delta * (0.5 * geom.theta).tan();
    let upsilon = PI.sqrt() * geom.beta / (SQRT_2 * w_delta);
    let erf_u = erf(upsilon);
    // w_eq² = w_δ² √π erf(υ) e^{υ²} / (2υ); e^{υ²} overflows long before
    // the product does, so go through logs
    let ln_ratio = 0.5 * PI.ln() + erf_u.ln() + upsilon * upsilon - (2.0 * upsilon).ln();
    let w_eq = w_delta * (0.5 * ln_ratio).exp();
    BeamStats { w_delta, upsilon, w_eq, a0: erf_u * erf_u }
}

impl BeamStats {
    /// Collected fraction at radial misalignment `r ≥ 0`.
    #[inline]
    pub fn pointing_gain(&self, r: f64) -> f64 {
        self.a0 * (-2.0 * r * r / (self.w_eq * self.w_eq)).exp()
    }

    /// `∫₀^∞ h_p(r) f_r(r) dr` in closed form (a Gaussian integral).
    pub fn mean_pointing_gain(&self, sigma_s: f64) -> f64 {
        let w2 = self.w_eq * self.w_eq;
        self.a0 * w2 / (w2 + 4.0 * sigma_s * sigma_s)
    }
}

pub fn pointing_gain(geom: &BeamGeometry, delta: f64, r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::domain("pointing_gain", format!("negative misalignment r = {r:e}")));
    }
    Ok(beam_stats(geom, delta).pointing_gain(r))
}

/// Rayleigh density of the radial misalignment, 1/m.
pub fn rayleigh_pdf(sigma_s: f64, r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::domain("rayleigh_pdf", format!("negative misalignment r = {r:e}")));
    }
    if !(sigma_s > 0.0) {
        return Err(Error::domain("rayleigh_pdf", "sigma_s must be positive"));
    }
    let s2 = sigma_s * sigma_s;
    Ok(r / s2 * (-r * r / (2.0 * s2)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_gain_examples() {
        let lossless = SkinParams { delta: 4e-3, mu_a: 0.0, mu_s: 0.0 };
        assert_eq!(path_gain(&lossless), 1.0);
        let s = SkinParams { delta: 4e-3, mu_a: 600.0, mu_s: 400.0 };
        assert!((path_gain(&s) - (-4.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn table_geometry() {
        let g = BeamGeometry { theta: 20f64.to_radians(), beta: 2e-3, sigma_s: 1e-4 };
        let b = beam_stats(&g, 6e-3);
        assert!((b.w_delta - 1.0579e-3).abs() < 1e-7);
        assert!((b.upsilon - 2.3696).abs() < 1e-3);
        assert!((b.a0 - 0.99839).abs() < 1e-4);
    }

    #[test]
    fn pointing_gain_shape() {
        let g = BeamGeometry { theta: 20f64.to_radians(), beta: 2e-3, sigma_s: 1e-4 };
        let b = beam_stats(&g, 6e-3);
        assert_eq!(b.pointing_gain(0.0), b.a0);
        let r = b.w_eq / SQRT_2;
        assert!((b.pointing_gain(r) - b.a0 / std::f64::consts::E).abs() < 1e-15);
        assert!(pointing_gain(&g, 6e-3, -1e-9).is_err());
    }

    #[test]
    fn huge_aperture_stays_finite() {
        let g = BeamGeometry { theta: 5f64.to_radians(), beta: 5e-3, sigma_s: 1e-4 };
        let b = beam_stats(&g, 4e-3);
        assert!(b.w_eq.is_finite() && b.a0 == 1.0);
    }

    #[test]
    fn rayleigh_pdf_basics() {
        assert_eq!(rayleigh_pdf(1e-4, 0.0).unwrap(), 0.0);
        assert!(rayleigh_pdf(1e-4, -1e-6).is_err());
        let at = |r: f64| rayleigh_pdf(1e-4, r).unwrap();
        assert!(at(1e-4) > at(0.99e-4) && at(1e-4) > at(1.01e-4));
    }
}
