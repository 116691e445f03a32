use crate::error::{Error, Result};

/// Bessel function of the first kind, order one, for `x >= 0`.
///
/// Backed by `libm::j1` (FreeBSD msun rational approximations). Negative
/// arguments are outside the contract; the odd extension is returned.
#[inline]
pub fn bessel_j1(x: f64) -> f64 {
    libm::j1(x)
}

// Above this the power series gives way to the Hankel asymptotic expansion.
const I0_ASYMPTOTIC_FROM: f64 = 25.0;

/// Exponentially scaled modified Bessel function `exp(-x) * I0(x)`, `x >= 0`.
///
/// Finite for every finite argument.
pub fn bessel_i0_scaled(x: f64) -> f64 {
    let x = x.abs();
    if x <= I0_ASYMPTOTIC_FROM {
        (-x).exp() * i0_series(x)
    } else {
        i0_asymptotic_scaled(x)
    }
}

/// Modified Bessel function of the first kind, order zero.
///
/// Returns [`Error::Overflow`] when the unscaled value is not representable;
/// use [`bessel_i0_scaled`] in that regime.
pub fn bessel_i0(x: f64) -> Result<f64> {
    let x = x.abs();
    if x <= I0_ASYMPTOTIC_FROM {
        return Ok(i0_series(x));
    }
    let scaled = i0_asymptotic_scaled(x);
    if x + scaled.ln() >= f64::MAX.ln() {
        return Err(Error::Overflow { func: "bessel_i0", hint: None });
    }
    // exp(x) alone may overflow even when the product does not
    let half = (0.5 * x).exp();
    Ok(scaled * half * half)
}

// sum (x^2/4)^k / (k!)^2; every term positive, so no cancellation.
fn i0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        sum += term;
        if term <= sum * 1e-17 {
            return sum;
        }
        k += 1.0;
    }
}

// e^{-x} I0(x) ~ (2 pi x)^{-1/2} sum_k ((2k-1)!!)^2 / (k! (8x)^k)
fn i0_asymptotic_scaled(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let kf = k as f64;
        let next = term * (2.0 * kf - 1.0).powi(2) / (8.0 * kf * x);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    sum / (2.0 * std::f64::consts::PI * x).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j1_anchor_values() {
        assert_eq!(bessel_j1(0.0), 0.0);
        assert!((bessel_j1(1.0) - 0.440_050_585_7).abs() < 1e-9);
        assert!(bessel_j1(3.8317).abs() < 1e-4);
    }

    #[test]
    fn i0_anchor_values() {
        assert_eq!(bessel_i0(0.0).unwrap(), 1.0);
        assert!((bessel_i0(1.0).unwrap() - 1.266_065_877_8).abs() < 1e-9);
        // e^{-100} I0(100) = 0.0399443792990967 (high-precision reference)
        assert!((bessel_i0_scaled(100.0) - 0.039_944_379_299_096_7).abs() < 1e-13);
    }

    #[test]
    fn i0_branches_meet() {
        let x = I0_ASYMPTOTIC_FROM;
        let a = (-x).exp() * i0_series(x);
        let b = i0_asymptotic_scaled(x);
        assert!((a - b).abs() / b < 1e-14, "{a} vs {b}");
    }

    #[test]
    fn i0_overflow_is_signalled() {
        assert!(bessel_i0(700.0).is_ok());
        assert!(bessel_i0(713.0).unwrap().is_finite());
        assert_eq!(bessel_i0(720.0), Err(Error::Overflow { func: "bessel_i0", hint: None }));
        assert!(bessel_i0_scaled(720.0).is_finite());
    }

    #[test]
    fn i0_is_monotone() {
        let mut prev = 0.0;
        for i in 0..2000 {
            let v = bessel_i0(i as f64 * 0.35).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }
}
