//! Scalar special functions and the series / quadrature engines used by the
//! model layers. Nothing in here knows about optics.

mod bessel;
mod gamma;
mod hypergeo;
mod quad;

pub use bessel::{bessel_i0, bessel_i0_scaled, bessel_j1};
pub use gamma::{ln_gamma, poisson_cdf, poisson_ln_pmf, poisson_sf, regularized_gamma_p, regularized_gamma_q};
pub use hypergeo::{cancellation_limit, f4_general, humbert_psi2, SeriesControl, SeriesValue};
pub use quad::{
    integrate, integrate_breaks, integrate_semi_infinite, integrate_semi_infinite_with_breaks, QuadControl, QuadValue,
};

/// Error function. Backed by the musl/FreeBSD implementation in `libm`,
/// accurate to about one ulp.
#[inline]
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Complementary error function, `1 - erf(x)` without cancellation.
#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erf_basics() {
        assert_eq!(erf(0.0), 0.0);
        assert!((erf(6.0) - 1.0).abs() <= 1e-15);
        for &x in &[0.1, 0.7, 1.5, 3.2] {
            assert_eq!(erf(-x), -erf(x));
        }
        assert!((erf(2.3696) - 0.99919).abs() < 1e-5);
    }
}
