//! Globally adaptive Gauss–Kronrod (7/15) quadrature on finite intervals,
//! and a panel scheme for integrals over `[0, ∞)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Semi-infinite integrals are first integrated over
    /// `[0, tail_cutoff_sigmas · decay_scale]`, then extended panel by panel.
    pub tail_cutoff_sigmas: f64,
}

impl Default for QuadControl {
    fn default() -> Self {
        QuadControl { rel_tol: 1e-9, abs_tol: 1e-300, max_subdivisions: 2000, tail_cutoff_sigmas: 10.0 }
    }
}

impl QuadControl {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !self.rel_tol.is_finite() {
            return Err(Error::config("numerics.quadrature.rel_tol", "must be > 0"));
        }
        if !(self.abs_tol >= 0.0) || !self.abs_tol.is_finite() {
            return Err(Error::config("numerics.quadrature.abs_tol", "must be >= 0"));
        }
        if self.max_subdivisions < 4 {
            return Err(Error::config("numerics.quadrature.max_subdivisions", "must be >= 4"));
        }
        if !(self.tail_cutoff_sigmas >= 6.0) || !self.tail_cutoff_sigmas.is_finite() {
            return Err(Error::config("numerics.quadrature.tail_cutoff_sigmas", "must be >= 6"));
        }
        Ok(())
    }

    fn tolerance(&self, value: f64) -> f64 {
        (self.rel_tol * value.abs()).max(self.abs_tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadValue {
    pub value: f64,
    pub err_est: f64,
    /// Intervals in the final partition.
    pub subdivisions: usize,
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// QUADPACK's heuristic error scaling.
fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    abs: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err).then_with(|| other.a.total_cmp(&self.a))
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    if !value.is_finite() || !res_asc.is_finite() {
        return Err(Error::domain("integrate", format!("integrand not finite on [{a:e}, {b:e}]")));
    }
    let err = rescale_error((res_k - res_g) * half, res_abs * half.abs(), res_asc * half.abs());
    Ok(Segment { a, b, value, err, abs: res_abs * half.abs() })
}

const ROUNDOFF: f64 = 100.0 * f64::EPSILON;

/// Adaptive integration over consecutive intervals `nodes[i]..nodes[i+1]`,
/// to absolute tolerance `max(rel_tol·|I|, floor)`.
fn adaptive<F: Fn(f64) -> f64>(f: &F, nodes: &[f64], rel_tol: f64, floor: f64, max_sub: usize) -> Result<QuadValue> {
    let mut heap = BinaryHeap::new();
    for w in nodes.windows(2) {
        if w[1] > w[0] {
            heap.push(gk15(f, w[0], w[1])?);
        }
    }
    let mut value: f64 = heap.iter().map(|s| s.value).sum();
    let mut err: f64 = heap.iter().map(|s| s.err).sum();
    let mut abs: f64 = heap.iter().map(|s| s.abs).sum();
    // an integral that cancels to (nearly) zero cannot be resolved below
    // the rounding level of the integrand's absolute mass
    while err > (rel_tol * value.abs()).max(floor).max(ROUNDOFF * abs) {
        if heap.len() >= max_sub {
            return Err(Error::QuadratureExhausted { value, error: err, subdivisions: heap.len() });
        }
        let worst = heap.pop().expect("non-empty partition");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval at floating-point resolution; cannot refine further
            heap.push(worst);
            return Err(Error::QuadratureExhausted { value, error: err, subdivisions: heap.len() });
        }
        let left = gk15(f, worst.a, mid)?;
        let right = gk15(f, mid, worst.b)?;
        value += left.value + right.value - worst.value;
        err += left.err + right.err - worst.err;
        abs += left.abs + right.abs - worst.abs;
        heap.push(left);
        heap.push(right);
    }
    // resum in interval order so the reported value does not depend on the
    // history of running-sum updates
    let mut segments = heap.into_vec();
    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    Ok(QuadValue {
        value: segments.iter().map(|s| s.value).sum(),
        err_est: segments.iter().map(|s| s.err).sum(),
        subdivisions: segments.len(),
    })
}

/// `∫_a^b f`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, ctl: &QuadControl) -> Result<QuadValue> {
    integrate_breaks(f, &[a, b], ctl)
}

/// Integral over `[points[0], points[last]]` with the initial partition at
/// the given (ascending) points, e.g. at known kinks or peaks.
pub fn integrate_breaks<F: Fn(f64) -> f64>(f: F, points: &[f64], ctl: &QuadControl) -> Result<QuadValue> {
    ctl.validate()?;
    if points.len() < 2 || points.iter().any(|p| !p.is_finite()) || points.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain("integrate", "need at least two finite, ascending points"));
    }
    adaptive(&f, points, ctl.rel_tol, ctl.abs_tol, ctl.max_subdivisions)
}

/// `∫_0^∞ f` for an integrand decaying on the length `decay_scale`.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(f: F, decay_scale: f64, ctl: &QuadControl) -> Result<QuadValue> {
    integrate_semi_infinite_with_breaks(f, decay_scale, &[], ctl)
}

const MAX_TAIL_PANELS: usize = 60;

/// As [`integrate_semi_infinite`], with extra initial breakpoints inside the
/// first panel. Beyond `tail_cutoff_sigmas · decay_scale` the range is
/// covered by panels of doubling width until a panel no longer contributes.
pub fn integrate_semi_infinite_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    decay_scale: f64,
    breaks: &[f64],
    ctl: &QuadControl,
) -> Result<QuadValue> {
    ctl.validate()?;
    if !(decay_scale > 0.0) || !decay_scale.is_finite() {
        return Err(Error::domain("integrate_semi_infinite", "decay scale must be positive and finite"));
    }
    let cutoff = ctl.tail_cutoff_sigmas * decay_scale;
    let mut nodes = vec![0.0];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&p| p > 0.0 && p < cutoff).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    nodes.extend(inner);
    nodes.push(cutoff);

    // Half of the error budget goes to the main panel, the rest is shared
    // geometrically among the tail panels.
    let main = adaptive(&f, &nodes, 0.5 * ctl.rel_tol, 0.5 * ctl.abs_tol, ctl.max_subdivisions)?;
    let mut value = main.value;
    let mut err = main.err_est;
    let mut subdivisions = main.subdivisions;
    let mut lo = cutoff;
    for k in 0..MAX_TAIL_PANELS {
        let hi = 2.0 * lo;
        let share = 0.5f64.powi(k as i32 + 2);
        let floor = share * ctl.tolerance(value);
        let panel = adaptive(&f, &[lo, hi], 0.25 * ctl.rel_tol, floor, ctl.max_subdivisions)?;
        value += panel.value;
        err += panel.err_est;
        subdivisions += panel.subdivisions;
        if panel.value.abs() + panel.err_est <= floor {
            // what lies beyond is bounded by the (already small, decaying)
            // contribution of this panel
            err += panel.value.abs();
            let tol = ctl.tolerance(value);
            if err > tol {
                return Err(Error::QuadratureExhausted { value, error: err, subdivisions });
            }
            return Ok(QuadValue { value, err_est: err, subdivisions });
        }
        lo = hi;
    }
    Err(Error::QuadratureExhausted { value, error: err, subdivisions })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let v = integrate(|x| x * x * x - 2.0 * x, 0.0, 2.0, &QuadControl::default()).unwrap();
        assert!((v.value - 0.0).abs() < 1e-14);
    }

    #[test]
    fn sqrt_singularity_refines() {
        let v = integrate(|x: f64| x.sqrt(), 0.0, 1.0, &QuadControl::default()).unwrap();
        assert!((v.value - 2.0 / 3.0).abs() < 1e-10);
        assert!(v.subdivisions > 1);
    }

    #[test]
    fn semi_infinite_examples() {
        let ctl = QuadControl::default();
        let v = integrate_semi_infinite(|r| r * (-r * r / 2.0).exp(), 1.0, &ctl).unwrap();
        assert!((v.value - 1.0).abs() < 1e-10);
        let v = integrate_semi_infinite(|r: f64| (-r).exp(), 1.0, &ctl).unwrap();
        assert!((v.value - 1.0).abs() < 1e-10);
        let v = integrate_semi_infinite(|r: f64| r.powi(3) * (-r * r).exp(), 1.0, &ctl).unwrap();
        assert!((v.value - 0.5).abs() < 1e-9);
        assert!(v.err_est <= ctl.tolerance(v.value));
    }

    #[test]
    fn slow_tail_is_followed() {
        // decay scale deliberately understated
        let v = integrate_semi_infinite(|r: f64| (-r / 30.0).exp() / 30.0, 1.0, &QuadControl::default()).unwrap();
        assert!((v.value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn exhaustion_is_reported() {
        let ctl = QuadControl { max_subdivisions: 4, rel_tol: 1e-14, ..QuadControl::default() };
        let err = integrate(|x: f64| (1.0 / x.max(1e-300)).sin(), 1e-6, 1.0, &ctl).unwrap_err();
        assert!(matches!(err, Error::QuadratureExhausted { .. }));
    }

    #[test]
    fn deterministic() {
        let ctl = QuadControl::default();
        let f = |r: f64| (r * 3.0).sin().powi(2) * (-r).exp();
        let a = integrate_semi_infinite(f, 1.0, &ctl).unwrap();
        let b = integrate_semi_infinite(f, 1.0, &ctl).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }

    #[test]
    fn control_validation() {
        let d = QuadControl::default();
        assert!(QuadControl { rel_tol: 0.0, ..d }.validate().is_err());
        assert!(QuadControl { max_subdivisions: 3, ..d }.validate().is_err());
        assert!(QuadControl { tail_cutoff_sigmas: 5.0, ..d }.validate().is_err());
    }
}
