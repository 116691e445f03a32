//! Signal chain from emitted power to photon flux at the neurons, and the
//! pointing-averaged flux by three independent routes.

use std::cell::RefCell;
use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::channel::{path_gain, BeamStats};
use crate::config::LinkConfig;
use crate::error::{Error, Result};
use crate::exec::{chunks, Execution};
use crate::optics::{
    collimation_gain, coupling_argument, coupling_eta_closed, eta_overlap, fiber_efficiency, CouplingKernel,
};
use crate::specfun::{f4_general, integrate_semi_infinite_with_breaks, poisson_ln_pmf, QuadControl, SeriesControl};
use crate::stochastics::{sample_rayleigh, RngStream};

/// Planck constant, J·s (exact).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Speed of light in vacuum, m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceParams {
    /// Emitted optical power, W.
    pub power_tx: f64,
    /// Wavelength, m.
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeuralParams {
    /// Background fluorescence rate, photons/s.
    pub f0: f64,
    /// Neuron response time constant, s.
    pub tau: f64,
    /// Excitation threshold, photons per response window.
    pub y_th: f64,
    /// Damage threshold, photons per response window (`INFINITY`: none).
    pub d_th: f64,
}

impl NeuralParams {
    /// Mean background count `B̄ = F₀ τ`.
    pub fn background_mean(&self) -> f64 {
        self.f0 * self.tau
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FluxMethod {
    Series,
    Quadrature,
    #[serde(rename = "mc")]
    MonteCarlo,
}

impl FluxMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            FluxMethod::Series => "series",
            FluxMethod::Quadrature => "quadrature",
            FluxMethod::MonteCarlo => "mc",
        }
    }
}

impl std::fmt::Display for FluxMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A scalar estimate tagged with the route that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxEstimate {
    pub value: f64,
    pub method: FluxMethod,
    /// Truncation bound, quadrature error estimate or standard error.
    pub err_bound: f64,
    pub n_samples: Option<u64>,
    pub seed: Option<u64>,
}

impl FluxEstimate {
    fn deterministic(value: f64, err_bound: f64, method: FluxMethod) -> Self {
        FluxEstimate { value, method, err_bound, n_samples: None, seed: None }
    }
}

/// Photon rate carried by optical power `power` at wavelength `lambda`.
pub fn photon_flux(power: f64, lambda: f64) -> f64 {
    power * lambda / (PLANCK * SPEED_OF_LIGHT)
}

/// Factor turning a steady flux into the count collected over one
/// response window with exponential decay: `τ (e - 1)/e`.
pub fn response_window_gain(tau: f64) -> f64 {
    tau * (E - 1.0) / E
}

/// Mean count over the response window: `Φ̄ τ (e - 1)/e + B̄`.
pub fn link_budget(mean_flux: f64, np: &NeuralParams) -> f64 {
    mean_flux * response_window_gain(np.tau) + np.background_mean()
}

/// Poisson probability of `n` background photons in one window.
pub fn background_pmf(np: &NeuralParams, n: u64) -> f64 {
    let mean = np.background_mean();
    if mean == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    poisson_ln_pmf(n, mean).exp()
}

/// Offset-independent quantities of a configured link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelState {
    pub path_gain: f64,
    pub beam: BeamStats,
    pub collimation_gain: f64,
    pub fiber_efficiency: f64,
    pub coupling_argument: f64,
    /// Coupling efficiency with perfect alignment.
    pub eta_aligned: f64,
    /// `k G_c h_l λ x / (h c)`: flux per unit `η h_p`, photons/s.
    pub flux_scale: f64,
}

impl ChannelState {
    pub fn new(cfg: &LinkConfig) -> Self {
        let h_l = path_gain(&cfg.skin);
        let g_c = collimation_gain(&cfg.mem);
        let k = fiber_efficiency(&cfg.fiber);
        let a = coupling_argument(&cfg.coupling);
        ChannelState {
            path_gain: h_l,
            beam: cfg.beam_stats(),
            collimation_gain: g_c,
            fiber_efficiency: k,
            coupling_argument: a,
            eta_aligned: crate::optics::aligned_efficiency(a),
            flux_scale: k * g_c * h_l * photon_flux(cfg.source.power_tx, cfg.source.lambda),
        }
    }

    /// Length on which the Rayleigh-weighted pointing factor decays, m.
    fn pointing_scale(&self, sigma_s: f64) -> f64 {
        let w2 = self.beam.w_eq * self.beam.w_eq;
        (2.0 * (2.0 / w2 + 0.5 / (sigma_s * sigma_s))).sqrt().recip()
    }
}

/// Photon flux at the neurons for radial misalignment `r`, photons/s.
pub fn received_flux_at(r: f64, cfg: &LinkConfig) -> Result<f64> {
    let st = ChannelState::new(cfg);
    let eta = match coupling_eta_closed(&cfg.coupling, r, &cfg.series) {
        Ok(eta) => eta,
        Err(e) if e.is_numerical() => eta_overlap(st.coupling_argument, r / cfg.coupling.omega0, &cfg.quad)?,
        Err(e) => return Err(e),
    };
    Ok(st.flux_scale * eta * st.beam.pointing_gain(r))
}

/// Mean flux from the quadruple-series closed form.
pub fn mean_flux_series(cfg: &LinkConfig, ctl: &SeriesControl) -> Result<FluxEstimate> {
    let st = ChannelState::new(cfg);
    let omega0 = cfg.coupling.omega0;
    let sigma = cfg.beam.sigma_s;
    let w_eq = st.beam.w_eq;
    let c = 2.0 / (omega0 * omega0) + 2.0 / (w_eq * w_eq) + 0.5 / (sigma * sigma);
    let y = 1.0 / (omega0 * omega0 * c);
    let a = st.coupling_argument;
    let prefactor = st.flux_scale * st.beam.a0 * 2.0 * a / (2.0 * sigma * sigma * c);
    let f4 = f4_general(-a, -a, y, y, ctl).map_err(|e| e.with_hint("mean_flux_quadrature"))?;
    Ok(FluxEstimate::deterministic(prefactor * f4.value, prefactor.abs() * f4.err_bound, FluxMethod::Series))
}

/// Mean flux by quadrature of `Φ(r) f_r(r)` over `r`, with the coupling
/// efficiency itself taken from the overlap integral at every node.
pub fn mean_flux_quadrature(cfg: &LinkConfig, ctl: &QuadControl) -> Result<FluxEstimate> {
    let st = ChannelState::new(cfg);
    let omega0 = cfg.coupling.omega0;
    let sigma = cfg.beam.sigma_s;
    let s2 = sigma * sigma;
    let a = st.coupling_argument;
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let integrand = |r: f64| {
        if failure.borrow().is_some() {
            return 0.0;
        }
        let weight = st.beam.pointing_gain(r) * r / s2 * (-r * r / (2.0 * s2)).exp();
        if weight == 0.0 {
            return 0.0;
        }
        match eta_overlap(a, r / omega0, ctl) {
            Ok(eta) => eta * weight,
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                0.0
            }
        }
    };
    let scale = st.pointing_scale(sigma);
    let breaks = [0.5 * omega0, omega0, 2.0 * omega0, 4.0 * omega0, sigma, scale, 3.0 * scale];
    let q = integrate_semi_infinite_with_breaks(integrand, scale, &breaks, ctl);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let q = q?;
    // each node carries the inner integral's relative error twice (η ∝ I²)
    let err = q.err_est + 2.0 * ctl.rel_tol * q.value.abs();
    Ok(FluxEstimate::deterministic(st.flux_scale * q.value, st.flux_scale * err, FluxMethod::Quadrature))
}

/// Running mean and sum of squared deviations (Welford / Chan).
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Moments {
    pub n: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(self, o: Moments) -> Moments {
        if self.n == 0 {
            return o;
        }
        if o.n == 0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * o.n as f64 / n as f64,
            m2: self.m2 + o.m2 + d * d * self.n as f64 * o.n as f64 / n as f64,
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        (self.m2 / (self.n - 1) as f64 / self.n as f64).sqrt()
    }
}

/// Samples `r ~ Rayleigh(σ_s)` with the per-sample coupling efficiency,
/// shared by the flux and KPI estimators.
pub(crate) struct OffsetSampler<'a> {
    cfg: &'a LinkConfig,
    pub state: ChannelState,
    kernel: CouplingKernel,
}

impl<'a> OffsetSampler<'a> {
    pub fn new(cfg: &'a LinkConfig) -> Self {
        // inversion of u ∈ (2⁻⁵³, 1) never exceeds 8.6 σ_s
        let r_max = 9.0 * cfg.beam.sigma_s;
        OffsetSampler { cfg, state: ChannelState::new(cfg), kernel: CouplingKernel::new(&cfg.coupling, r_max) }
    }

    /// `Φ(r)` for one offset.
    pub fn flux(&self, r: f64) -> Result<f64> {
        let eta = match self.kernel.eta(r) {
            Some(eta) => eta,
            None => eta_overlap(self.state.coupling_argument, r / self.cfg.coupling.omega0, &self.cfg.quad)?,
        };
        Ok(self.state.flux_scale * eta * self.state.beam.pointing_gain(r))
    }

    pub fn draw(&self, stream: &mut RngStream) -> Result<f64> {
        self.flux(sample_rayleigh(stream, self.cfg.beam.sigma_s))
    }
}

/// Monte Carlo mean flux from `n` Rayleigh offsets.
pub fn mean_flux_mc(cfg: &LinkConfig, n: u64, seed: u64) -> Result<FluxEstimate> {
    mean_flux_mc_with(cfg, n, seed, Execution::default())
}

pub fn mean_flux_mc_with(cfg: &LinkConfig, n: u64, seed: u64, exec: Execution) -> Result<FluxEstimate> {
    if n < 1000 {
        return Err(Error::domain("mean_flux_mc", format!("need at least 1000 samples, got {n}")));
    }
    let sampler = OffsetSampler::new(cfg);
    let parts = chunks(n as usize);
    let partial = exec.map(parts.len(), |i| -> Result<Moments> {
        let (id, len) = parts[i];
        let mut stream = RngStream::new(seed, id);
        let mut m = Moments::default();
        for _ in 0..len {
            m.push(sampler.draw(&mut stream)?);
        }
        Ok(m)
    });
    let mut total = Moments::default();
    for m in partial {
        total = total.merge(m?);
    }
    Ok(FluxEstimate {
        value: total.mean,
        method: FluxMethod::MonteCarlo,
        err_bound: total.std_error(),
        n_samples: Some(n),
        seed: Some(seed),
    })
}

/// Mean flux by the requested route. `Series` falls back to quadrature
/// when the series fails numerically unless `strict` is set; the method
/// tag of the result tells which route produced it.
pub fn mean_flux(cfg: &LinkConfig, method: FluxMethod, strict: bool, exec: Execution) -> Result<FluxEstimate> {
    match method {
        FluxMethod::Series => match mean_flux_series(cfg, &cfg.series) {
            Err(e) if !strict && e.is_numerical() => mean_flux_quadrature(cfg, &cfg.quad),
            other => other,
        },
        FluxMethod::Quadrature => mean_flux_quadrature(cfg, &cfg.quad),
        FluxMethod::MonteCarlo => mean_flux_mc_with(cfg, cfg.mc.samples, cfg.mc.seed, exec),
    }
}
