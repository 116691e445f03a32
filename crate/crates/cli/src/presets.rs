//! Bundled figure presets: a config, the sweeps that make up the figure,
//! how to draw them, and the trend checks printed alongside.

use aoci_core::exec::Execution;
use aoci_core::kpi::{safety_check, threshold_probabilities};
use aoci_core::photometry::{mean_flux_quadrature, FluxMethod};
use aoci_core::sweep::{Axis, Metric, SweepSpec};
use aoci_core::LinkConfig;

pub const FIGURES: std::ops::RangeInclusive<u8> = 3..=8;

pub struct Preset {
    pub number: u8,
    pub title: &'static str,
    pub config: &'static str,
    pub calibration: &'static str,
}

pub fn preset(n: u8) -> Option<Preset> {
    let (title, config, calibration) = match n {
        3 => (
            "Mean photon flux vs skin thickness and divergence angle, 20 mW",
            include_str!("../presets/fig3/config.json"),
            include_str!("../presets/fig3/calibration.md"),
        ),
        4 => (
            "Mean photon flux vs skin thickness and transmit power",
            include_str!("../presets/fig4/config.json"),
            include_str!("../presets/fig4/calibration.md"),
        ),
        5 => (
            "Mean photon flux vs pointing jitter, 40 mW",
            include_str!("../presets/fig5/config.json"),
            include_str!("../presets/fig5/calibration.md"),
        ),
        6 => (
            "Mean photon flux vs transmit power",
            include_str!("../presets/fig6/config.json"),
            include_str!("../presets/fig6/calibration.md"),
        ),
        7 => (
            "Hearing probability vs pointing jitter and transmit power",
            include_str!("../presets/fig7/config.json"),
            include_str!("../presets/fig7/calibration.md"),
        ),
        8 => (
            "Hearing (solid) and damage (dashed) probability vs transmit power",
            include_str!("../presets/fig8/config.json"),
            include_str!("../presets/fig8/calibration.md"),
        ),
        _ => return None,
    };
    Some(Preset { number: n, title, config, calibration })
}

impl Preset {
    pub fn link_config(&self) -> LinkConfig {
        LinkConfig::from_json(self.config).expect("bundled preset is valid")
    }

    /// Sweeps making up the figure, each with a file-name suffix.
    pub fn sweeps(&self) -> Vec<(&'static str, SweepSpec)> {
        let spec = |p1: &str, v1: &[f64], p2: &str, v2: &[f64], metric| SweepSpec {
            axis1: Axis { path: p1.into(), values: v1.to_vec() },
            axis2: Some(Axis { path: p2.into(), values: v2.to_vec() }),
            metric,
            method: FluxMethod::Quadrature,
            mc: None,
        };
        let deltas: Vec<f64> = (0..13).map(|i| 4.0 + 0.5 * i as f64).collect();
        let families = [4.0, 6.0, 8.0, 10.0];
        match self.number {
            3 => {
                let thetas: Vec<f64> = (0..11).map(|i| 5.0 + 2.5 * i as f64).collect();
                vec![("", spec("skin.delta_mm", &deltas, "beam.theta_deg", &thetas, Metric::MeanFlux))]
            }
            4 => {
                let powers: Vec<f64> = (1..=10).map(|i| 5.0 * i as f64).collect();
                vec![("", spec("skin.delta_mm", &deltas, "source.power_mw", &powers, Metric::MeanFlux))]
            }
            5 => {
                let sigmas = [0.01, 0.02, 0.03, 0.05, 0.07, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0];
                vec![("", spec("skin.delta_mm", &families, "beam.sigma_s_mm", &sigmas, Metric::MeanFlux))]
            }
            6 => {
                let powers = [1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0];
                vec![(
                    "",
                    spec("beam.sigma_s_mm", &[0.01, 0.05, 0.1, 0.5], "source.power_mw", &powers, Metric::MeanFlux),
                )]
            }
            7 => {
                let sigmas = [0.01, 0.02, 0.05, 0.1, 0.2, 0.5];
                let powers = [20.0, 40.0, 60.0, 80.0, 100.0, 120.0];
                vec![("", spec("beam.sigma_s_mm", &sigmas, "source.power_mw", &powers, Metric::PHearing))]
            }
            8 => {
                let powers = [1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0, 2000.0, 5000.0, 10000.0];
                vec![
                    ("_p_hearing", spec("skin.delta_mm", &families, "source.power_mw", &powers, Metric::PHearing)),
                    ("_p_damage", spec("skin.delta_mm", &families, "source.power_mw", &powers, Metric::PDamage)),
                ]
            }
            _ => unreachable!("preset numbers are checked on construction"),
        }
    }

    pub fn plot_style(&self) -> PlotStyle {
        match self.number {
            3 | 4 | 7 => PlotStyle::Heatmap,
            5 => PlotStyle::Curves { x_log: true, y_log: true },
            6 => PlotStyle::Curves { x_log: true, y_log: true },
            8 => PlotStyle::Curves { x_log: true, y_log: false },
            _ => unreachable!("preset numbers are checked on construction"),
        }
    }
}

/// Two-axis sweeps are drawn either as a heatmap (axis1 across, axis2 up)
/// or as one curve per axis1 value over axis2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotStyle {
    Heatmap,
    Curves { x_log: bool, y_log: bool },
}

/// A scale-free trend with its target.
#[derive(Debug, Clone)]
pub struct TrendCheck {
    pub label: String,
    pub measured: f64,
    pub target: &'static str,
    pub passed: bool,
}

fn flux(cfg: &LinkConfig, edits: &[(&str, f64)]) -> anyhow::Result<f64> {
    let c = edits.iter().try_fold(cfg.clone(), |c, &(p, v)| c.with_value(p, v))?;
    Ok(mean_flux_quadrature(&c, &c.quad)?.value)
}

fn hearing(cfg: &LinkConfig, edits: &[(&str, f64)], exec: Execution) -> anyhow::Result<f64> {
    let c = edits.iter().try_fold(cfg.clone(), |c, &(p, v)| c.with_value(p, v))?;
    Ok(threshold_probabilities(&c, &[c.neural.y_th], c.mc.samples, c.mc.seed, exec)?[0].p)
}

/// Trend checks for figure `n`, evaluated on `cfg` (the preset, possibly
/// with a different Monte Carlo budget).
pub fn trend_checks(n: u8, cfg: &LinkConfig, exec: Execution) -> anyhow::Result<Vec<TrendCheck>> {
    let check = |label: &str, measured: f64, target: &'static str, passed: bool| TrendCheck {
        label: label.into(),
        measured,
        target,
        passed,
    };
    Ok(match n {
        3 => {
            let d = flux(cfg, &[("skin.delta_mm", 6.0), ("beam.theta_deg", 20.0)])?
                / flux(cfg, &[("skin.delta_mm", 8.0), ("beam.theta_deg", 20.0)])?
                - 1.0;
            let t = flux(cfg, &[("skin.delta_mm", 6.0), ("beam.theta_deg", 20.0)])?
                / flux(cfg, &[("skin.delta_mm", 6.0), ("beam.theta_deg", 30.0)])?
                - 1.0;
            vec![
                check("flux gain, delta 8 -> 6 mm at theta = 20 deg", d, "about +0.44, positive", d > 0.0),
                check("flux gain, theta 30 -> 20 deg at delta = 6 mm", t, "about +0.03, positive", t > 0.0),
            ]
        }
        4 => {
            let r = 1.0
                - flux(cfg, &[("skin.delta_mm", 6.0), ("source.power_mw", 10.0)])?
                    / flux(cfg, &[("skin.delta_mm", 6.0), ("source.power_mw", 20.0)])?;
            vec![check("flux loss, 20 -> 10 mW at delta = 6 mm", r, "about 0.49", (0.4..=0.6).contains(&r))]
        }
        5 => {
            let at = |s| flux(cfg, &[("skin.delta_mm", 6.0), ("source.power_mw", 40.0), ("beam.sigma_s_mm", s)]);
            let base = at(0.1)?;
            let r = at(1.0)? / base;
            vec![
                check(
                    "flux ratio sigma_s 1 mm / 0.1 mm at delta = 6 mm",
                    r,
                    "in [0.01, 0.05], about 0.0144",
                    (0.01..=0.05).contains(&r),
                ),
                check(
                    "mean flux at sigma_s = 0.1 mm, photons/s",
                    base,
                    "7.13e15 (calibrated)",
                    (base / 7.13e15 - 1.0).abs() < 0.01,
                ),
            ]
        }
        6 => {
            let at = |s| flux(cfg, &[("source.power_mw", 20.0), ("beam.sigma_s_mm", s)]);
            let r = at(0.1)? / at(0.5)?;
            let g = at(0.01)? / at(0.05)? - 1.0;
            vec![
                check("flux ratio sigma_s 0.1 mm / 0.5 mm at 20 mW", r, ">= 10, about 16.7", r >= 10.0),
                check("flux gain, sigma_s 0.05 -> 0.01 mm at 20 mW", g, "about +0.45, positive", g > 0.0),
            ]
        }
        7 => {
            let ph = |s, p| hearing(cfg, &[("beam.sigma_s_mm", s), ("source.power_mw", p)], exec);
            let gain = ph(0.1, 120.0)? / ph(0.1, 20.0)? - 1.0;
            let loss = 1.0 - ph(0.5, 100.0)? / ph(0.1, 100.0)?;
            let realistic = ph(0.05, 20.0)?;
            vec![
                check("P_h gain, 20 -> 120 mW at sigma_s = 0.1 mm", gain, "about +0.36, positive", gain > 0.0),
                check("P_h loss, sigma_s 0.1 -> 0.5 mm at 100 mW", loss, "about 0.93", loss > 0.5),
                check("P_h at sigma_s = 0.05 mm, 20 mW", realistic, "> 0.9", realistic > 0.9),
            ]
        }
        8 => {
            let s = &cfg.safety;
            let skin_limit = s.skin_mpe * std::f64::consts::PI * s.skin_spot_radius * s.skin_spot_radius;
            let mut out =
                vec![check("skin-MPE power, W", skin_limit, "about 1.8 (500 mW/mm^2 over the skin spot)", true)];
            for delta in [4.0, 6.0, 8.0, 10.0] {
                let c = cfg.with_value("skin.delta_mm", delta)?.with_value("source.power_mw", skin_limit * 1e3)?;
                let pd = threshold_probabilities(&c, &[c.neural.d_th], c.mc.samples, c.mc.seed, exec)?[0].p;
                out.push(TrendCheck {
                    label: format!("P_d at the skin-MPE power, delta = {delta} mm"),
                    measured: pd,
                    target: "< 1e-3 (the skin limit binds first)",
                    passed: pd < 1e-3,
                });
                let range = safety_check(&cfg.with_value("skin.delta_mm", delta)?, exec)?.dynamic_range;
                out.push(TrendCheck {
                    label: match range {
                        Some((lo, hi)) => format!("dynamic range [{lo:.4}, {hi:.4}] W at delta = {delta} mm, width"),
                        None => format!("dynamic range at delta = {delta} mm (empty)"),
                    },
                    measured: range.map_or(0.0, |(lo, hi)| hi - lo),
                    target: "nonempty",
                    passed: range.is_some(),
                });
            }
            out
        }
        _ => anyhow::bail!("no figure {n}; presets exist for 3 to 8"),
    })
}
