//! Seeded random variates for the Monte Carlo estimators.
//!
//! Every estimator splits its sample budget into fixed-size chunks and
//! draws chunk `k` from its own ChaCha8 stream, so results depend only on
//! `(seed, n)` and never on how many workers processed the chunks.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::specfun::{ln_gamma, poisson_ln_pmf};

/// A reproducible random sequence identified by `(seed, stream_id)`.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RngStream { seed, stream_id, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform on the open interval (0, 1).
    #[inline]
    pub fn uniform_open(&mut self) -> f64 {
        self.rng.sample(Open01)
    }

    /// Uniform on [0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }
}

/// Rayleigh variate with scale `sigma_s`, by inversion. Strictly positive.
#[inline]
pub fn sample_rayleigh(stream: &mut RngStream, sigma_s: f64) -> f64 {
    debug_assert!(sigma_s > 0.0);
    sigma_s * (-2.0 * stream.uniform_open().ln()).sqrt()
}

/// Means up to this value are sampled by sequential inversion.
pub const POISSON_INVERSION_MAX: f64 = 30.0;

/// Poisson variate: inversion for small means, Hörmann's transformed
/// rejection (PTRS) above [`POISSON_INVERSION_MAX`].
pub fn sample_poisson(stream: &mut RngStream, mean: f64) -> u64 {
    debug_assert!(mean >= 0.0 && mean.is_finite());
    if mean <= 0.0 {
        0
    } else if mean <= POISSON_INVERSION_MAX {
        poisson_inversion(stream, mean)
    } else {
        poisson_ptrs(stream, mean)
    }
}

fn poisson_inversion(stream: &mut RngStream, mean: f64) -> u64 {
    let u = stream.uniform();
    let mut k = 0u64;
    let mut p = (-mean).exp();
    let mut cdf = p;
    while u >= cdf {
        k += 1;
        p *= mean / k as f64;
        let next = cdf + p;
        if next == cdf {
            // remaining mass below rounding; u sits in the last ulp of the cdf
            break;
        }
        cdf = next;
    }
    k
}

// W. Hörmann, "The transformed rejection method for generating Poisson
// random variables", Insurance: Mathematics and Economics 12 (1993).
fn poisson_ptrs(stream: &mut RngStream, mean: f64) -> u64 {
    let slam = mean.sqrt();
    let loglam = mean.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = stream.uniform() - 0.5;
        let v = stream.uniform();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + mean + 0.43).floor();
        if k < 0.0 {
            continue;
        }
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        if us < 0.013 && v > us {
            continue;
        }
        let lhs = (v * inv_alpha / (a / (us * us) + b)).ln();
        let rhs = if mean < 1e6 {
            -mean + k * loglam - ln_gamma(k + 1.0)
        } else {
            // the log-gamma form loses digits at huge means
            poisson_ln_pmf(k as u64, mean)
        };
        if lhs <= rhs {
            return k as u64;
        }
    }
}
