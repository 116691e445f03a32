//! Hearing, false-hearing and damage probabilities, irradiance limits and
//! the usable range of transmit power.
//!
//! All thresholds are photon counts over one response window: the signal
//! count is `Φ(r) τ (e - 1)/e` and the background is `N ~ Poisson(F₀ τ)`.

use std::f64::consts::PI;

use crate::config::LinkConfig;
use crate::error::{Error, Result};
use crate::exec::{chunks, Execution};
use crate::photometry::{response_window_gain, NeuralParams, OffsetSampler};
use crate::specfun::{poisson_sf, regularized_gamma_q};
use crate::stochastics::{sample_poisson, RngStream};

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

pub const MIN_KPI_SAMPLES: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SafetyParams {
    /// Skin maximum permissible exposure, W/m².
    pub skin_mpe: f64,
    /// Neuron maximum permissible exposure, W/m².
    pub neuron_mpe: f64,
    /// Beam radius at the skin surface used for irradiance, m.
    pub skin_spot_radius: f64,
    /// Illuminated radius at the fiber output, m.
    pub neuron_spot_radius: f64,
    /// Hearing probability required inside the dynamic range.
    pub hearing_target: f64,
}

/// A Monte Carlo probability with its 95% Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityEstimate {
    pub p: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_samples: u64,
    pub seed: u64,
}

pub fn wilson_interval(successes: u64, n: u64) -> (f64, f64) {
    let n_f = n as f64;
    let p = successes as f64 / n_f;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n_f;
    let center = (p + z2 / (2.0 * n_f)) / denom;
    let half = Z95 * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Draws `(signal count, background count)` pairs. Offsets and background
/// use separate streams (`2k` and `2k + 1` for chunk `k`), so estimates at
/// different powers or thresholds share their randomness exactly.
struct CountSampler<'a> {
    offsets: OffsetSampler<'a>,
    window: f64,
    background: f64,
    shot_noise: bool,
}

impl<'a> CountSampler<'a> {
    fn new(cfg: &'a LinkConfig) -> Self {
        CountSampler {
            offsets: OffsetSampler::new(cfg),
            window: response_window_gain(cfg.neural.tau),
            background: cfg.neural.background_mean(),
            shot_noise: cfg.mc.signal_shot_noise,
        }
    }

    /// Visit every sample of the `(n, seed)` budget, chunk by chunk.
    fn fold<A, F>(&self, n: u64, seed: u64, exec: Execution, init: A, f: F) -> Result<Vec<A>>
    where
        A: Clone + Send + Sync,
        F: Fn(&mut A, f64, u64) + Sync + Send,
    {
        let parts = chunks(n as usize);
        exec.map(parts.len(), |i| {
            let (id, len) = parts[i];
            let mut offsets = RngStream::new(seed, 2 * id);
            let mut noise = RngStream::new(seed, 2 * id + 1);
            let mut acc = init.clone();
            for _ in 0..len {
                let signal = self.offsets.draw(&mut offsets)? * self.window;
                let (signal, count) = if self.shot_noise {
                    (0.0, sample_poisson(&mut noise, signal + self.background))
                } else {
                    (signal, sample_poisson(&mut noise, self.background))
                };
                f(&mut acc, signal, count);
            }
            Ok(acc)
        })
        .into_iter()
        .collect()
    }
}

/// `Pr(S + N ≥ t)` for each threshold `t`, from one shared sample set.
pub fn threshold_probabilities(
    cfg: &LinkConfig,
    thresholds: &[f64],
    n: u64,
    seed: u64,
    exec: Execution,
) -> Result<Vec<ProbabilityEstimate>> {
    if n < MIN_KPI_SAMPLES {
        return Err(Error::domain(
            "threshold_probabilities",
            format!("need at least {MIN_KPI_SAMPLES} samples, got {n}"),
        ));
    }
    let sampler = CountSampler::new(cfg);
    let counts = sampler.fold(n, seed, exec, vec![0u64; thresholds.len()], |acc, s, c| {
        let y = s + c as f64;
        for (hits, &t) in acc.iter_mut().zip(thresholds) {
            if y >= t {
                *hits += 1;
            }
        }
    })?;
    Ok((0..thresholds.len())
        .map(|j| {
            let hits: u64 = counts.iter().map(|c| c[j]).sum();
            let (ci_low, ci_high) = wilson_interval(hits, n);
            ProbabilityEstimate { p: hits as f64 / n as f64, ci_low, ci_high, n_samples: n, seed }
        })
        .collect())
}

/// Probability that the count over one window reaches the excitation threshold.
pub fn p_hearing(cfg: &LinkConfig, n: u64, seed: u64) -> Result<ProbabilityEstimate> {
    p_hearing_with(cfg, n, seed, Execution::default())
}

pub fn p_hearing_with(cfg: &LinkConfig, n: u64, seed: u64, exec: Execution) -> Result<ProbabilityEstimate> {
    Ok(threshold_probabilities(cfg, &[cfg.neural.y_th], n, seed, exec)?[0])
}

/// Probability that the count reaches the damage threshold (background
/// contribution kept; it is negligible against realistic thresholds).
pub fn p_damage(cfg: &LinkConfig, n: u64, seed: u64) -> Result<ProbabilityEstimate> {
    p_damage_with(cfg, n, seed, Execution::default())
}

pub fn p_damage_with(cfg: &LinkConfig, n: u64, seed: u64, exec: Execution) -> Result<ProbabilityEstimate> {
    Ok(threshold_probabilities(cfg, &[cfg.neural.d_th], n, seed, exec)?[0])
}

/// False-hearing probability with no transmission.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FalseHearing {
    /// `Pr(N ≥ y_th)`, the definition.
    pub literal: f64,
    /// `Γ(y_th + 1, B̄)/y_th!`, the regularized upper incomplete gamma form.
    /// This is `Pr(N ≤ y_th)`, the complement of the event above (plus
    /// `Pr(N = y_th)`), and is reported so the two readings can be compared.
    pub gamma_closed_form: f64,
}

pub fn p_false_hearing(np: &NeuralParams) -> Result<FalseHearing> {
    let mean = np.background_mean();
    let k = np.y_th.max(0.0).ceil() as u64;
    let literal = if mean == 0.0 {
        if k == 0 {
            1.0
        } else {
            0.0
        }
    } else {
        poisson_sf(k, mean)?
    };
    Ok(FalseHearing { literal, gamma_closed_form: regularized_gamma_q(np.y_th + 1.0, mean)? })
}

/// Irradiances and the power interval satisfying both the hearing target
/// and the exposure limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SafetyReport {
    /// W/m².
    pub skin_irradiance: f64,
    /// W/m², at the fiber output for aligned coupling.
    pub neuron_irradiance: f64,
    pub mpe_skin_ok: bool,
    pub mpe_neuron_ok: bool,
    /// Largest power meeting both exposure limits, W.
    pub max_safe_power: f64,
    /// Smallest power reaching the hearing target, W (`None`: unreachable).
    pub min_hearing_power: Option<f64>,
    /// `[min_hearing_power, max_safe_power]` when nonempty.
    pub dynamic_range: Option<(f64, f64)>,
}

/// Skin and neuron irradiance per watt emitted, m⁻².
fn irradiance_per_watt(cfg: &LinkConfig) -> (f64, f64) {
    let st = crate::photometry::ChannelState::new(cfg);
    let delivered = st.fiber_efficiency * st.eta_aligned * st.collimation_gain * st.path_gain * st.beam.a0;
    let s = &cfg.safety;
    (
        1.0 / (PI * s.skin_spot_radius * s.skin_spot_radius),
        delivered / (PI * s.neuron_spot_radius * s.neuron_spot_radius),
    )
}

/// Largest emitted power satisfying both exposure limits, W.
pub fn max_safe_power(cfg: &LinkConfig) -> f64 {
    let (skin, neuron) = irradiance_per_watt(cfg);
    (cfg.safety.skin_mpe / skin).min(cfg.safety.neuron_mpe / neuron)
}

/// Smallest emitted power whose hearing probability reaches the target.
///
/// Without signal shot noise each sample `i` is heard exactly when the
/// power exceeds `(y_th - N_i)/s_i`, with `s_i` the signal count per watt,
/// so the answer is an order statistic of those per-sample powers.
pub fn min_hearing_power(cfg: &LinkConfig, n: u64, seed: u64, exec: Execution) -> Result<Option<f64>> {
    if n < MIN_KPI_SAMPLES {
        return Err(Error::domain("min_hearing_power", format!("need at least {MIN_KPI_SAMPLES} samples, got {n}")));
    }
    let target = cfg.safety.hearing_target;
    let mut unit = cfg.clone();
    unit.source.power_tx = 1.0;
    if cfg.mc.signal_shot_noise {
        return min_hearing_power_bisect(&unit, target, n, seed, exec);
    }
    let y_th = cfg.neural.y_th;
    let sampler = CountSampler::new(&unit);
    let per_chunk = sampler.fold(n, seed, exec, Vec::new(), |acc: &mut Vec<f64>, per_watt, count| {
        let missing = y_th - count as f64;
        acc.push(if missing <= 0.0 {
            0.0
        } else if per_watt > 0.0 {
            missing / per_watt
        } else {
            f64::INFINITY
        });
    })?;
    let mut powers: Vec<f64> = per_chunk.into_iter().flatten().collect();
    let rank = ((target * n as f64).ceil() as usize).clamp(1, powers.len()) - 1;
    let (_, &mut p, _) = powers.select_nth_unstable_by(rank, f64::total_cmp);
    Ok(p.is_finite().then_some(p))
}

fn min_hearing_power_bisect(unit: &LinkConfig, target: f64, n: u64, seed: u64, exec: Execution) -> Result<Option<f64>> {
    let heard = |power: f64| -> Result<bool> {
        let mut c = unit.clone();
        c.source.power_tx = power;
        Ok(p_hearing_with(&c, n, seed, exec)?.p >= target)
    };
    let (mut lo, mut hi) = (1e-12f64, 1e3f64);
    if !heard(hi)? {
        return Ok(None);
    }
    if heard(lo)? {
        return Ok(Some(lo));
    }
    while hi / lo > 1.0 + 1e-6 {
        let mid = (lo * hi).sqrt();
        if heard(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

pub fn safety_check(cfg: &LinkConfig, exec: Execution) -> Result<SafetyReport> {
    let (skin, neuron) = irradiance_per_watt(cfg);
    let x = cfg.source.power_tx;
    let max_safe = max_safe_power(cfg);
    let min_hear = min_hearing_power(cfg, cfg.mc.samples, cfg.mc.seed, exec)?;
    Ok(SafetyReport {
        skin_irradiance: skin * x,
        neuron_irradiance: neuron * x,
        mpe_skin_ok: skin * x <= cfg.safety.skin_mpe,
        mpe_neuron_ok: neuron * x <= cfg.safety.neuron_mpe,
        max_safe_power: max_safe,
        min_hearing_power: min_hear,
        dynamic_range: min_hear.filter(|&lo| lo <= max_safe).map(|lo| (lo, max_safe)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KpiReport {
    pub p_hearing: ProbabilityEstimate,
    pub p_false_hearing: FalseHearing,
    pub p_damage: ProbabilityEstimate,
    pub safety: SafetyReport,
}

pub fn kpi_report(cfg: &LinkConfig, exec: Execution) -> Result<KpiReport> {
    let (n, seed) = (cfg.mc.samples, cfg.mc.seed);
    let p = threshold_probabilities(cfg, &[cfg.neural.y_th, cfg.neural.d_th], n, seed, exec)?;
    Ok(KpiReport {
        p_hearing: p[0],
        p_false_hearing: p_false_hearing(&cfg.neural)?,
        p_damage: p[1],
        safety: safety_check(cfg, exec)?,
    })
}
