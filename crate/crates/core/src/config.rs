//! JSON configuration with unit-suffixed keys, converted once to SI.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::channel::{beam_stats, BeamGeometry, BeamStats, SkinParams};
use crate::error::{Error, Result};
use crate::kpi::SafetyParams;
use crate::optics::{coupling_argument, CouplingParams, FiberLoss, MemParams};
use crate::photometry::{NeuralParams, SourceParams};
use crate::specfun::{QuadControl, SeriesControl};

const MM: f64 = 1e-3;
const NM: f64 = 1e-9;
const MW: f64 = 1e-3;
// mW/mm² → W/m²
const MW_PER_MM2: f64 = 1e3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSection {
    pub power_mw: f64,
    pub lambda_nm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkinSection {
    pub delta_mm: f64,
    pub mu_a_per_mm: f64,
    pub mu_s_per_mm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamSection {
    pub theta_deg: f64,
    pub beta_mm: f64,
    pub sigma_s_mm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemSection {
    pub d_in_mm: f64,
    pub f_mm: f64,
    pub z0_mm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSection {
    pub d_mm: f64,
    pub f_mm: f64,
    pub omega0_mm: f64,
    /// Optional; must equal `source.lambda_nm` when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_nm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberSection {
    pub bend_db_per_90deg: f64,
    pub n_quarter_turns: f64,
    pub fbg_fraction_lost: f64,
    pub n_fbg: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NeuralSection {
    pub f0_per_s: f64,
    pub tau_s: f64,
    pub y_th_photons: f64,
    /// `null` disables the damage threshold.
    pub d_th_photons: Option<f64>,
}

fn default_skin_mpe() -> f64 {
    500.0
}
fn default_neuron_mpe() -> f64 {
    75.0
}
fn default_hearing_target() -> f64 {
    0.9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SafetySection {
    #[serde(default = "default_skin_mpe")]
    pub skin_mpe_mw_per_mm2: f64,
    #[serde(default = "default_neuron_mpe")]
    pub neuron_mpe_mw_per_mm2: f64,
    pub skin_spot_radius_mm: f64,
    /// Defaults to the fiber mode-field radius.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub neuron_spot_radius_mm: Option<f64>,
    #[serde(default = "default_hearing_target")]
    pub hearing_target: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsSection {
    #[serde(default)]
    pub series: SeriesControl,
    #[serde(default)]
    pub quadrature: QuadControl,
}

/// Monte Carlo budget for the sampled estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloParams {
    pub samples: u64,
    pub seed: u64,
    /// Draw the total count as Poisson(signal + B̄) instead of
    /// signal + Poisson(B̄). Not part of the reference model.
    #[serde(default)]
    pub signal_shot_noise: bool,
}

impl Default for MonteCarloParams {
    fn default() -> Self {
        MonteCarloParams { samples: 100_000, seed: 1, signal_shot_noise: false }
    }
}

/// The configuration file as written by the user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub source: SourceSection,
    pub skin: SkinSection,
    pub beam: BeamSection,
    pub mem: MemSection,
    pub coupling: CouplingSection,
    pub fiber: FiberSection,
    pub neural: NeuralSection,
    pub safety: SafetySection,
    #[serde(default)]
    pub numerics: NumericsSection,
    #[serde(default)]
    pub monte_carlo: MonteCarloParams,
}

/// A validated link configuration in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkConfig {
    pub source: SourceParams,
    pub skin: SkinParams,
    pub beam: BeamGeometry,
    pub mem: MemParams,
    pub coupling: CouplingParams,
    pub fiber: FiberLoss,
    pub neural: NeuralParams,
    pub safety: SafetyParams,
    pub series: SeriesControl,
    pub quad: QuadControl,
    pub mc: MonteCarloParams,
    /// Non-fatal remarks (values outside the studied ranges).
    pub warnings: Vec<String>,
    file: ConfigFile,
}

struct Checker {
    warnings: Vec<String>,
}

impl Checker {
    fn require(&self, ok: bool, path: &str, msg: &str) -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(Error::config(path, msg))
        }
    }

    fn positive(&self, v: f64, path: &str) -> Result<()> {
        self.require(v.is_finite() && v > 0.0, path, "must be a finite number > 0")
    }

    fn non_negative(&self, v: f64, path: &str) -> Result<()> {
        self.require(v.is_finite() && v >= 0.0, path, "must be a finite number >= 0")
    }

    fn warn_outside(&mut self, v: f64, lo: f64, hi: f64, path: &str) {
        if v < lo || v > hi {
            self.warnings.push(format!("{path} = {v} is outside the modelled range [{lo}, {hi}]"));
        }
    }
}

impl ConfigFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::config(format!("line {} column {}", e.line(), e.column()), e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn to_link_config(&self) -> Result<LinkConfig> {
        LinkConfig::from_file(self.clone())
    }
}

impl LinkConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(ConfigFile::from_json(text)?)
    }

    pub fn from_file(file: ConfigFile) -> Result<Self> {
        let mut c = Checker { warnings: Vec::new() };
        let f = &file;

        c.non_negative(f.source.power_mw, "source.power_mw")?;
        c.positive(f.source.lambda_nm, "source.lambda_nm")?;
        c.warn_outside(f.source.lambda_nm, 300.0, 1000.0, "source.lambda_nm");

        c.positive(f.skin.delta_mm, "skin.delta_mm")?;
        c.warn_outside(f.skin.delta_mm, 1.0, 20.0, "skin.delta_mm");
        c.non_negative(f.skin.mu_a_per_mm, "skin.mu_a_per_mm")?;
        c.non_negative(f.skin.mu_s_per_mm, "skin.mu_s_per_mm")?;

        c.require(
            f.beam.theta_deg.is_finite() && f.beam.theta_deg > 0.0 && f.beam.theta_deg < 180.0,
            "beam.theta_deg",
            "must lie in (0, 180)",
        )?;
        c.positive(f.beam.beta_mm, "beam.beta_mm")?;
        c.positive(f.beam.sigma_s_mm, "beam.sigma_s_mm")?;

        c.non_negative(f.mem.d_in_mm, "mem.d_in_mm")?;
        c.positive(f.mem.f_mm, "mem.f_mm")?;
        c.positive(f.mem.z0_mm, "mem.z0_mm")?;

        c.positive(f.coupling.d_mm, "coupling.d_mm")?;
        c.positive(f.coupling.f_mm, "coupling.f_mm")?;
        c.positive(f.coupling.omega0_mm, "coupling.omega0_mm")?;
        if let Some(l) = f.coupling.lambda_nm {
            c.require(l == f.source.lambda_nm, "coupling.lambda_nm", "must equal source.lambda_nm")?;
        }

        c.non_negative(f.fiber.bend_db_per_90deg, "fiber.bend_db_per_90deg")?;
        c.non_negative(f.fiber.n_quarter_turns, "fiber.n_quarter_turns")?;
        c.require(
            f.fiber.fbg_fraction_lost.is_finite() && (0.0..1.0).contains(&f.fiber.fbg_fraction_lost),
            "fiber.fbg_fraction_lost",
            "must lie in [0, 1)",
        )?;

        c.non_negative(f.neural.f0_per_s, "neural.f0_per_s")?;
        c.positive(f.neural.tau_s, "neural.tau_s")?;
        c.positive(f.neural.y_th_photons, "neural.y_th_photons")?;
        if let Some(d) = f.neural.d_th_photons {
            c.require(
                d.is_finite() && d > f.neural.y_th_photons,
                "neural.d_th_photons",
                "must exceed neural.y_th_photons (or be null)",
            )?;
        }

        c.positive(f.safety.skin_mpe_mw_per_mm2, "safety.skin_mpe_mw_per_mm2")?;
        c.positive(f.safety.neuron_mpe_mw_per_mm2, "safety.neuron_mpe_mw_per_mm2")?;
        c.positive(f.safety.skin_spot_radius_mm, "safety.skin_spot_radius_mm")?;
        if let Some(r) = f.safety.neuron_spot_radius_mm {
            c.positive(r, "safety.neuron_spot_radius_mm")?;
        }
        c.require(
            f.safety.hearing_target > 0.0 && f.safety.hearing_target < 1.0,
            "safety.hearing_target",
            "must lie in (0, 1)",
        )?;

        f.numerics.series.validate()?;
        f.numerics.quadrature.validate()?;
        c.require(f.monte_carlo.samples >= 10_000, "monte_carlo.samples", "must be >= 10000")?;

        let lambda = f.source.lambda_nm * NM;
        let cfg = LinkConfig {
            source: SourceParams { power_tx: f.source.power_mw * MW, lambda },
            skin: SkinParams {
                delta: f.skin.delta_mm * MM,
                mu_a: f.skin.mu_a_per_mm / MM,
                mu_s: f.skin.mu_s_per_mm / MM,
            },
            beam: BeamGeometry {
                theta: f.beam.theta_deg.to_radians(),
                beta: f.beam.beta_mm * MM,
                sigma_s: f.beam.sigma_s_mm * MM,
            },
            mem: MemParams { d_in: f.mem.d_in_mm * MM, f: f.mem.f_mm * MM, z0: f.mem.z0_mm * MM },
            coupling: CouplingParams {
                d: f.coupling.d_mm * MM,
                f: f.coupling.f_mm * MM,
                omega0: f.coupling.omega0_mm * MM,
                lambda,
            },
            fiber: FiberLoss {
                bend_db_per_90deg: f.fiber.bend_db_per_90deg,
                n_quarter_turns: f.fiber.n_quarter_turns,
                fbg_fraction_lost: f.fiber.fbg_fraction_lost,
                n_fbg: f.fiber.n_fbg,
            },
            neural: NeuralParams {
                f0: f.neural.f0_per_s,
                tau: f.neural.tau_s,
                y_th: f.neural.y_th_photons,
                d_th: f.neural.d_th_photons.unwrap_or(f64::INFINITY),
            },
            safety: SafetyParams {
                skin_mpe: f.safety.skin_mpe_mw_per_mm2 * MW_PER_MM2,
                neuron_mpe: f.safety.neuron_mpe_mw_per_mm2 * MW_PER_MM2,
                skin_spot_radius: f.safety.skin_spot_radius_mm * MM,
                neuron_spot_radius: f.safety.neuron_spot_radius_mm.unwrap_or(f.coupling.omega0_mm) * MM,
                hearing_target: f.safety.hearing_target,
            },
            series: f.numerics.series,
            quad: f.numerics.quadrature,
            mc: f.monte_carlo,
            warnings: Vec::new(),
            file: file.clone(),
        };

        let a = coupling_argument(&cfg.coupling);
        c.require(a.is_finite() && a > 0.0, "coupling", "coupling argument is not a finite positive number")?;
        let b = cfg.beam_stats();
        c.require(
            b.w_eq.is_finite() && b.a0 > 0.0,
            "beam.beta_mm",
            "aperture too large (or beam too narrow) for the Gaussian spread model: w_eq overflows",
        )?;
        Ok(LinkConfig { warnings: c.warnings, ..cfg })
    }

    pub fn file(&self) -> &ConfigFile {
        &self.file
    }

    pub fn to_json(&self) -> String {
        self.file.to_json()
    }

    pub fn beam_stats(&self) -> BeamStats {
        beam_stats(&self.beam, self.skin.delta)
    }

    /// Short SHA-256 of the canonical JSON form, for provenance columns.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(&self.file).expect("config serialises");
        hex::encode(&Sha256::digest(canonical.as_bytes())[..8])
    }

    /// Read a numeric field by dotted path, e.g. `beam.sigma_s_mm`.
    pub fn get(&self, path: &str) -> Result<f64> {
        let v = serde_json::to_value(&self.file).expect("config serialises");
        lookup(&v, path)?.as_f64().ok_or_else(|| Error::config(path, "not a numeric field"))
    }

    /// Copy with a different Monte Carlo budget.
    pub fn with_mc(&self, samples: u64, seed: u64) -> Result<Self> {
        let mut file = self.file.clone();
        file.monte_carlo.samples = samples;
        file.monte_carlo.seed = seed;
        Self::from_file(file)
    }

    /// Copy with the numeric field at `path` replaced, re-validated.
    pub fn with_value(&self, path: &str, value: f64) -> Result<Self> {
        let mut v = serde_json::to_value(&self.file).expect("config serialises");
        let slot = lookup_mut(&mut v, path)?;
        let integral = match slot {
            Value::Number(n) => n.is_u64() || n.is_i64(),
            Value::Null => false,
            _ => return Err(Error::config(path, "not a numeric field")),
        };
        *slot = if integral {
            if value.fract() != 0.0 || !(0.0..=9.0e15).contains(&value) {
                return Err(Error::config(path, "must be a nonnegative integer"));
            }
            Value::from(value as u64)
        } else {
            serde_json::Number::from_f64(value)
                .map(Value::Number)
                .ok_or_else(|| Error::config(path, "value must be finite"))?
        };
        let file: ConfigFile = serde_json::from_value(v).map_err(|e| Error::config(path, e.to_string()))?;
        Self::from_file(file)
    }
}

fn lookup<'v>(v: &'v Value, path: &str) -> Result<&'v Value> {
    let pointer = format!("/{}", path.replace('.', "/"));
    v.pointer(&pointer).ok_or_else(|| Error::config(path, "no such config field"))
}

fn lookup_mut<'v>(v: &'v mut Value, path: &str) -> Result<&'v mut Value> {
    let pointer = format!("/{}", path.replace('.', "/"));
    v.pointer_mut(&pointer).ok_or_else(|| Error::config(path, "no such config field"))
}
