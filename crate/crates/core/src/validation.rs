//! Self-check suite: each route is compared against an independent one
//! or against an exact identity, and the model's monotone trends are
//! confirmed on small grids.

use std::time::{Duration, Instant};

use crate::config::LinkConfig;
use crate::error::Result;
use crate::exec::Execution;
use crate::kpi::threshold_probabilities;
use crate::optics::{
    coupling_eta_closed, coupling_eta_integral, focal_length_for_argument, max_coupling_efficiency, CouplingParams,
};
use crate::photometry::{mean_flux_mc_with, mean_flux_quadrature, mean_flux_series};
use crate::specfun::{integrate_semi_infinite, poisson_sf, regularized_gamma_q, QuadControl, SeriesControl};
use crate::stochastics::RngStream;

/// Link used by the flux and monotonicity checks: 40 mW at 594 nm through
/// 6 mm of skin, 0.1 mm pointing jitter, coupling at the optimal argument.
pub const REFERENCE_CONFIG: &str = r#"{
  "source": { "power_mw": 40.0, "lambda_nm": 594.0 },
  "skin": { "delta_mm": 6.0, "mu_a_per_mm": 0.0186, "mu_s_per_mm": 0.2 },
  "beam": { "theta_deg": 20.0, "beta_mm": 2.0, "sigma_s_mm": 0.1 },
  "mem": { "d_in_mm": 0.0, "f_mm": 10.0, "z0_mm": 0.001 },
  "coupling": { "d_mm": 0.1, "f_mm": 47.15015672373694, "omega0_mm": 0.1 },
  "fiber": { "bend_db_per_90deg": 0.14, "n_quarter_turns": 1.0, "fbg_fraction_lost": 0.1, "n_fbg": 1 },
  "neural": { "f0_per_s": 10.0, "tau_s": 0.15, "y_th_photons": 2.8353e14, "d_th_photons": 1.4984e17 },
  "safety": { "skin_spot_radius_mm": 1.066, "neuron_spot_radius_mm": 1.0 },
  "monte_carlo": { "samples": 100000, "seed": 1 }
}"#;

pub fn reference_config() -> LinkConfig {
    LinkConfig::from_json(REFERENCE_CONFIG).expect("reference config is valid")
}

#[derive(Debug, Clone, Copy)]
pub struct ValidateOptions {
    /// Reduced grids and sample counts.
    pub quick: bool,
    /// Relative error deliberately applied to every closed-form value,
    /// to confirm the suite can fail. Zero in normal use.
    pub perturbation: f64,
    pub exec: Execution,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions { quick: false, perturbation: 0.0, exec: Execution::default() }
    }
}

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed deviation, in the units of `limit`.
    pub worst: f64,
    pub limit: f64,
    pub detail: String,
    pub elapsed: Duration,
}

type CheckFn = fn(&ValidateOptions) -> Result<(f64, f64, String)>;

pub const CHECKS: [(&str, CheckFn); 6] = [
    ("coupling_closed_vs_integral", check_coupling_grid),
    ("coupling_maximum", check_coupling_maximum),
    ("mean_flux_three_way", check_mean_flux),
    ("pointing_integral_identity", check_pointing_integral),
    ("poisson_identities", check_poisson),
    ("monotonicity", check_monotonicity),
];

pub fn run_check(name: &'static str, check: CheckFn, opts: &ValidateOptions) -> CheckReport {
    let start = Instant::now();
    let (passed, worst, limit, detail) = match check(opts) {
        Ok((worst, limit, detail)) => (worst <= limit, worst, limit, detail),
        Err(e) => (false, f64::INFINITY, 0.0, format!("error: {e}")),
    };
    CheckReport { name, passed, worst, limit, detail, elapsed: start.elapsed() }
}

pub fn run_all(opts: &ValidateOptions) -> Vec<CheckReport> {
    CHECKS.iter().map(|&(name, check)| run_check(name, check, opts)).collect()
}

fn omega0_grid(quick: bool) -> &'static [f64] {
    if quick {
        &[0.1e-3]
    } else {
        &[0.05e-3, 0.07e-3, 0.1e-3, 0.15e-3, 0.2e-3, 0.3e-3, 0.4e-3, 0.5e-3, 0.7e-3, 1.0e-3]
    }
}

fn lens_for(a: f64, omega0: f64) -> CouplingParams {
    let (d, lambda) = (1e-4, 594e-9);
    CouplingParams { d, f: focal_length_for_argument(d, omega0, lambda, a), omega0, lambda }
}

/// Closed-form coupling efficiency against the overlap integral on
/// a ∈ [0.05, 5] × r ∈ [0, 3ω₀] × ω₀ grid; points where the series
/// declines are counted, not compared.
fn check_coupling_grid(o: &ValidateOptions) -> Result<(f64, f64, String)> {
    let (sc, qc) = (SeriesControl::default(), QuadControl::default());
    let (mut worst, mut compared, mut declined) = (0.0f64, 0, 0);
    for &omega0 in omega0_grid(o.quick) {
        for i in 0..10 {
            let cp = lens_for(0.05 + (5.0 - 0.05) * i as f64 / 9.0, omega0);
            for j in 0..10 {
                let r = 3.0 * omega0 * j as f64 / 9.0;
                let Ok(closed) = coupling_eta_closed(&cp, r, &sc) else {
                    declined += 1;
                    continue;
                };
                let closed = closed * (1.0 + o.perturbation);
                let integral = coupling_eta_integral(&cp, r, &qc)?;
                worst = worst.max((closed - integral).abs() / integral);
                compared += 1;
            }
        }
    }
    Ok((worst, 1e-6, format!("{compared} points compared, {declined} declined by the series")))
}

/// Peak aligned efficiency found by scanning the overlap integral, and
/// the closed form never exceeding it anywhere on the grid.
fn check_coupling_maximum(o: &ValidateOptions) -> Result<(f64, f64, String)> {
    let qc = QuadControl::default();
    let mut peak = (0.0f64, 0.0f64);
    for i in 0..=400 {
        let a = 0.5 + 1.5 * i as f64 / 400.0;
        let eta = coupling_eta_integral(&lens_for(a, 1e-4), 0.0, &qc)?;
        if eta > peak.1 {
            peak = (a, eta);
        }
    }
    let sc = SeriesControl::default();
    let mut excess = 0.0f64;
    for &omega0 in omega0_grid(o.quick) {
        for i in 0..10 {
            let cp = lens_for(0.05 + (5.0 - 0.05) * i as f64 / 9.0, omega0);
            for j in 0..10 {
                if let Ok(eta) = coupling_eta_closed(&cp, 3.0 * omega0 * j as f64 / 9.0, &sc) {
                    excess = excess.max(eta * (1.0 + o.perturbation) - max_coupling_efficiency());
                }
            }
        }
    }
    let off_target = (peak.1 - 0.8145).abs();
    // a grid point above the maximum is a failure regardless of size
    let worst = if excess > 1e-12 { f64::INFINITY } else { off_target };
    Ok((
        worst,
        5e-4,
        format!("scan peak η = {:.10} at a = {:.4}; largest grid excess over η_max {excess:.2e}", peak.1, peak.0),
    ))
}

/// Random valid link for the three-way comparison.
fn random_link(base: &LinkConfig, rng: &mut RngStream) -> Result<LinkConfig> {
    let mut u = |lo: f64, hi: f64| lo + (hi - lo) * rng.uniform();
    let omega0_mm = [0.05, 0.1, 0.2, 0.5, 1.0][(u(0.0, 5.0) as usize).min(4)];
    let a = u(0.3, 3.0);
    let sigma_mm = 10f64.powf(u(-2.0, 0.0));
    let lambda = base.source.lambda;
    let f = focal_length_for_argument(base.coupling.d, omega0_mm * 1e-3, lambda, a);
    let fields = [
        ("source.power_mw", u(1.0, 200.0)),
        ("skin.delta_mm", u(4.0, 10.0)),
        ("beam.theta_deg", u(5.0, 30.0)),
        ("beam.beta_mm", u(0.5, 3.0)),
        ("beam.sigma_s_mm", sigma_mm),
        ("coupling.omega0_mm", omega0_mm),
        ("coupling.f_mm", f * 1e3),
    ];
    fields.iter().try_fold(base.clone(), |c, &(path, v)| c.with_value(path, v))
}

/// Series and Monte Carlo mean flux against quadrature on random links.
/// Reported deviation is the larger of (series rel. error / 1e-6) and
/// (MC deviation / 3 standard errors), so the limit is 1.
fn check_mean_flux(o: &ValidateOptions) -> Result<(f64, f64, String)> {
    let base = reference_config();
    let (n_configs, n_samples) = if o.quick { (5, 100_000) } else { (20, 1_000_000) };
    let mut rng = RngStream::new(2024, 0);
    let (mut worst_series, mut worst_mc, mut declined) = (0.0f64, 0.0f64, 0);
    for k in 0..n_configs {
        let cfg = random_link(&base, &mut rng)?;
        let quad = mean_flux_quadrature(&cfg, &cfg.quad)?.value;
        match mean_flux_series(&cfg, &cfg.series) {
            Ok(s) => {
                let s = s.value * (1.0 + o.perturbation);
                worst_series = worst_series.max((s - quad).abs() / quad);
            }
            Err(e) if e.is_numerical() => declined += 1,
            Err(e) => return Err(e),
        }
        let mc = mean_flux_mc_with(&cfg, n_samples, 1000 + k, o.exec)?;
        worst_mc = worst_mc.max((mc.value - quad).abs() / mc.err_bound);
    }
    Ok((
        (worst_series / 1e-6).max(worst_mc / 3.0),
        1.0,
        format!(
            "{n_configs} links: series rel. error {worst_series:.2e} ({declined} declined), MC within {worst_mc:.2} std. errors at n = {n_samples}"
        ),
    ))
}

/// Rayleigh-averaged pointing gain by quadrature against
/// A₀ w_eq² / (w_eq² + 4σ_s²).
fn check_pointing_integral(o: &ValidateOptions) -> Result<(f64, f64, String)> {
    let base = reference_config();
    let ctl = QuadControl { rel_tol: 1e-13, ..QuadControl::default() };
    let mut worst = 0.0f64;
    let mut n = 0;
    for delta in [4.0, 7.0, 10.0] {
        for theta in [5.0, 15.0, 30.0] {
            for beta in [0.5, 2.0] {
                for sigma_mm in [0.01, 0.1, 1.0] {
                    let cfg = base
                        .with_value("skin.delta_mm", delta)?
                        .with_value("beam.theta_deg", theta)?
                        .with_value("beam.beta_mm", beta)?
                        .with_value("beam.sigma_s_mm", sigma_mm)?;
                    let b = cfg.beam_stats();
                    let s = cfg.beam.sigma_s;
                    let f = |r: f64| b.pointing_gain(r) * r / (s * s) * (-r * r / (2.0 * s * s)).exp();
                    let q = integrate_semi_infinite(f, s, &ctl)?.value;
                    let w2 = b.w_eq * b.w_eq;
                    let closed = b.a0 * w2 / (w2 + 4.0 * s * s) * (1.0 + o.perturbation);
                    worst = worst.max((q - closed).abs() / closed);
                    n += 1;
                }
            }
        }
    }
    Ok((worst, 1e-8, format!("{n} geometries")))
}

/// `Q(y+1, B̄)` against the explicit Poisson CDF sum, and the survival
/// probability against `1 − Q(y, B̄)`.
fn check_poisson(o: &ValidateOptions) -> Result<(f64, f64, String)> {
    let n_means = if o.quick { 9 } else { 33 };
    let mut worst = 0.0f64;
    for i in 0..n_means {
        let mean = 10f64.powf(-6.0 + 8.0 * i as f64 / (n_means - 1) as f64);
        let mut term = (-mean).exp();
        let mut cdf = 0.0;
        for y in 0..=200u64 {
            if y > 0 {
                term *= mean / y as f64;
            }
            cdf += term;
            let closed = regularized_gamma_q(y as f64 + 1.0, mean)? * (1.0 + o.perturbation);
            worst = worst.max((closed - cdf).abs());
            if y >= 1 {
                let survival = poisson_sf(y, mean)? * (1.0 + o.perturbation);
                let complement = 1.0 - regularized_gamma_q(y as f64, mean)?;
                worst = worst.max((survival - complement).abs());
            }
        }
    }
    Ok((worst, 1e-12, format!("y in 0..=200, {n_means} means in [1e-6, 100]")))
}

/// Trend checks on five-point grids. Deviations count violations.
fn check_monotonicity(o: &ValidateOptions) -> Result<(f64, f64, String)> {
    let base = reference_config();
    let n = if o.quick { 20_000 } else { 100_000 };
    let seed = base.mc.seed;
    let mut failures = Vec::new();

    let flux_along = |path: &str, values: &[f64]| -> Result<Vec<f64>> {
        values
            .iter()
            .map(|&v| {
                let c = base.with_value(path, v)?;
                Ok(mean_flux_quadrature(&c, &c.quad)?.value)
            })
            .collect()
    };
    let deltas = [4.0, 5.5, 7.0, 8.5, 10.0];
    let sigmas = [0.01, 0.05, 0.1, 0.5, 1.0];
    if !flux_along("skin.delta_mm", &deltas)?.windows(2).all(|w| w[1] < w[0]) {
        failures.push("mean flux not strictly decreasing in skin thickness");
    }
    if !flux_along("beam.sigma_s_mm", &sigmas)?.windows(2).all(|w| w[1] < w[0]) {
        failures.push("mean flux not strictly decreasing in pointing jitter");
    }

    let (y_th, d_th) = (base.neural.y_th, base.neural.d_th);
    let powers = [5.0, 20.0, 50.0, 100.0, 200.0];
    let mut hearing = Vec::new();
    for &p in &powers {
        let c = base.with_value("source.power_mw", p)?;
        let est = threshold_probabilities(&c, &[y_th, d_th], n, seed, o.exec)?;
        if est[1].p > est[0].p {
            failures.push("damage probability above hearing probability");
        }
        hearing.push(est[0].p);
    }
    if !hearing.windows(2).all(|w| w[1] >= w[0]) {
        failures.push("hearing probability decreasing in power");
    }
    let mut hearing = Vec::new();
    for &s in &sigmas {
        let c = base.with_value("beam.sigma_s_mm", s)?;
        hearing.push(threshold_probabilities(&c, &[y_th], n, seed, o.exec)?[0].p);
    }
    if !hearing.windows(2).all(|w| w[1] <= w[0]) {
        failures.push("hearing probability increasing in pointing jitter");
    }

    let detail = if failures.is_empty() {
        format!("flux vs thickness and jitter, hearing vs power and jitter ({n} samples), damage <= hearing")
    } else {
        failures.join("; ")
    };
    Ok((failures.len() as f64, 0.0, detail))
}
