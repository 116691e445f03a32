//! Collimation at the MEM reflector, Airy-to-Gaussian fiber coupling and
//! propagation loss along the optical fiber.
//!
//! The coupling efficiency has two independent evaluation routes: the
//! Ψ₂ closed form ([`coupling_eta_closed`], plus the regrouped
//! [`CouplingKernel`] for bulk sampling) and direct quadrature of the
//! overlap integral ([`coupling_eta_integral`]).

use crate::error::{Error, Result};
use crate::specfun::{
    bessel_i0_scaled, bessel_j1, humbert_psi2, integrate_breaks, poisson_ln_pmf, QuadControl, SeriesControl,
};

/// Airy first-zero constant and the diffraction factor, kept at the
/// rounded values that appear in the coupling formula.
pub const AIRY_ZERO: f64 = 3.83;
pub const AIRY_FACTOR: f64 = 1.22;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemParams {
    /// Beam waist to MEM surface, m.
    pub d_in: f64,
    /// MEM focal length, m.
    pub f: f64,
    /// Rayleigh range of the incident beam, m.
    pub z0: f64,
}

pub fn collimation_gain(mem: &MemParams) -> f64 {
    let u = 1.0 - mem.d_in / mem.f;
    let v = mem.z0 / mem.f;
    1.0 / (u * u + v * v).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingParams {
    /// Coupling-lens diameter, m.
    pub d: f64,
    /// Coupling-lens focal length, m.
    pub f: f64,
    /// Fiber mode-field radius, m.
    pub omega0: f64,
    /// Wavelength, m.
    pub lambda: f64,
}

/// Dimensionless coupling argument `a = (3.83 D ω₀ / (1.22 λ F))²`.
pub fn coupling_argument(cp: &CouplingParams) -> f64 {
    let t = AIRY_ZERO * cp.d * cp.omega0 / (AIRY_FACTOR * cp.lambda * cp.f);
    t * t
}

/// Focal length giving coupling argument `a` for the other lens/fiber values.
pub fn focal_length_for_argument(d: f64, omega0: f64, lambda: f64, a: f64) -> f64 {
    AIRY_ZERO * d * omega0 / (AIRY_FACTOR * lambda * a.sqrt())
}

/// The coupling argument maximising the aligned efficiency
/// `2(1 - e^{-a})²/a`, i.e. the root of `2a e^{-a} = 1 - e^{-a}`.
pub fn optimal_coupling_argument() -> f64 {
    let mut a: f64 = 1.25;
    for _ in 0..50 {
        let e = (-a).exp();
        let phi = 2.0 * a * e + f64::exp_m1(-a);
        let step = phi / (e * (1.0 - 2.0 * a));
        a -= step;
        if step.abs() < 1e-15 * a {
            break;
        }
    }
    a
}

/// Aligned (r = 0) efficiency as a function of the coupling argument.
pub fn aligned_efficiency(a: f64) -> f64 {
    let g = -f64::exp_m1(-a);
    2.0 * g * g / a
}

/// Upper bound of the coupling efficiency over all lens choices.
pub fn max_coupling_efficiency() -> f64 {
    aligned_efficiency(optimal_coupling_argument())
}

fn check_offset(func: &'static str, cp: &CouplingParams, r: f64) -> Result<()> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::domain(func, format!("offset r = {r:e} must be finite and >= 0")));
    }
    let a = coupling_argument(cp);
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::domain(func, format!("coupling argument {a:e} must be finite and > 0")));
    }
    Ok(())
}

/// Coupling efficiency at lateral offset `r` from the Ψ₂ closed form
/// `η = 2a e^{-2y} Ψ₂(1; 2, 1; -a, y)²`, `y = r²/ω₀²`.
pub fn coupling_eta_closed(cp: &CouplingParams, r: f64, ctl: &SeriesControl) -> Result<f64> {
    check_offset("coupling_eta_closed", cp, r)?;
    let a = coupling_argument(cp);
    let y = (r / cp.omega0).powi(2);
    let psi = humbert_psi2(2.0, 1.0, -a, y, ctl).map_err(|e| e.with_hint("coupling_eta_integral"))?;
    Ok(2.0 * a * (-2.0 * y).exp() * psi.value * psi.value)
}

/// Coupling efficiency at lateral offset `r` by quadrature of the
/// Airy–Gaussian overlap integral.
pub fn coupling_eta_integral(cp: &CouplingParams, r: f64, ctl: &QuadControl) -> Result<f64> {
    check_offset("coupling_eta_integral", cp, r)?;
    eta_overlap(coupling_argument(cp), r / cp.omega0, ctl)
}

/// `8 (∫₀^∞ J₁(2√a t) e^{-(t-s)²} [e^{-2ts} I₀(2ts)] dt)²` with `t = ρ/ω₀`,
/// `s = r/ω₀`. The bracket is the exponentially scaled I₀, so nothing
/// overflows at large offsets. The Gaussian confines the integrand to
/// `s ± tail_cutoff_sigmas`.
pub(crate) fn eta_overlap(a: f64, s: f64, ctl: &QuadControl) -> Result<f64> {
    let k = 2.0 * a.sqrt();
    let integrand = |t: f64| {
        let d = t - s;
        bessel_j1(k * t) * (-d * d).exp() * bessel_i0_scaled(2.0 * t * s)
    };
    let c = ctl.tail_cutoff_sigmas;
    let lo = (s - c).max(0.0);
    let points: Vec<f64> = if s > lo { vec![lo, s, s + c] } else { vec![lo, s + c] };
    let q = integrate_breaks(integrand, &points, ctl)?;
    Ok(8.0 * q.value * q.value)
}

/// Fast evaluator of the closed form for one coupling argument, used when
/// the efficiency is needed at very many offsets (Monte Carlo).
///
/// Writing `Ψ₂(1;2,1;-a,y) = Σ_n y^n/n! · g_n` with
/// `g_0 = (1 - e^{-a})/a` and `g_n = e^{-a} L⁽¹⁾_{n-1}(a)/n`, the efficiency
/// becomes `2a (Σ_n Pois(n; y) g_n)²`, a Poisson-weighted average of a
/// bounded sequence that is cheap and well conditioned for any `y`.
#[derive(Debug, Clone)]
pub struct CouplingKernel {
    a: f64,
    omega0: f64,
    g: Vec<f64>,
}

/// Relative accuracy the kernel must guarantee, else it declines.
const KERNEL_REL_TOL: f64 = 1e-9;

impl CouplingKernel {
    /// Kernel for offsets up to `r_max` (larger offsets are declined).
    pub fn new(cp: &CouplingParams, r_max: f64) -> Self {
        let a = coupling_argument(cp);
        let y_max = (r_max / cp.omega0).powi(2);
        let len = (y_max + 12.0 * y_max.sqrt() + 60.0).min(1e6) as usize;
        let mut g = Vec::with_capacity(len);
        g.push(-f64::exp_m1(-a) / a);
        let ea = (-a).exp();
        // generalized Laguerre L⁽¹⁾_k(a) by forward recurrence
        let (mut l_prev, mut l) = (1.0, 2.0 - a);
        g.push(ea * l_prev);
        for k in 1..len.saturating_sub(1) {
            g.push(ea * l / (k + 1) as f64);
            let kf = k as f64;
            let next = ((2.0 * kf + 2.0 - a) * l - (kf + 1.0) * l_prev) / (kf + 1.0);
            l_prev = l;
            l = next;
        }
        CouplingKernel { a, omega0: cp.omega0, g }
    }

    pub fn coupling_argument(&self) -> f64 {
        self.a
    }

    /// Efficiency at offset `r`, or `None` when `r` lies beyond the table
    /// or rounding could exceed the kernel tolerance.
    pub fn eta(&self, r: f64) -> Option<f64> {
        let y = (r / self.omega0).powi(2);
        if y == 0.0 {
            return Some(2.0 * self.a * self.g[0] * self.g[0]);
        }
        let mode = y.floor() as usize;
        if mode >= self.g.len() {
            return None;
        }
        let w_mode = poisson_ln_pmf(mode as u64, y).exp();
        const W_FLOOR: f64 = 1e-18;
        let (mut sum, mut comp, mut abs) = (0.0f64, 0.0f64, 0.0f64);
        let mut add = |t: f64| {
            // Neumaier summation
            let s = sum + t;
            comp += if sum.abs() >= t.abs() { (sum - s) + t } else { (t - s) + sum };
            sum = s;
            abs += t.abs();
        };
        let mut w = w_mode;
        let mut n = mode;
        loop {
            add(w * self.g[n]);
            n += 1;
            w *= y / n as f64;
            if w < W_FLOOR {
                break;
            }
            if n >= self.g.len() {
                return None;
            }
        }
        let n_hi = n;
        let mut w = w_mode;
        let mut n = mode;
        while n > 0 {
            w *= n as f64 / y;
            n -= 1;
            if w < W_FLOOR {
                break;
            }
            add(w * self.g[n]);
        }
        let total = sum + comp;
        let rounding = abs * (n_hi as f64 * 4e-16 + 1e-15) + W_FLOOR * 40.0;
        if rounding > KERNEL_REL_TOL * total.abs() {
            return None;
        }
        Some(2.0 * self.a * total * total)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberLoss {
    pub bend_db_per_90deg: f64,
    pub n_quarter_turns: f64,
    pub fbg_fraction_lost: f64,
    pub n_fbg: u32,
}

/// Propagation efficiency `k` of the fiber.
pub fn fiber_efficiency(fl: &FiberLoss) -> f64 {
    10f64.powf(-fl.bend_db_per_90deg * fl.n_quarter_turns / 10.0) * (1.0 - fl.fbg_fraction_lost).powi(fl.n_fbg as i32)
}
