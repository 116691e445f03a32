//! One- and two-axis parameter sweeps over config fields.

use serde::{Deserialize, Serialize};

use crate::config::LinkConfig;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::kpi::{p_false_hearing, threshold_probabilities};
use crate::photometry::{link_budget, mean_flux, FluxMethod};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    MeanFlux,
    PHearing,
    PFalseHearing,
    PDamage,
    LinkBudget,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::MeanFlux => "mean_flux",
            Metric::PHearing => "p_hearing",
            Metric::PFalseHearing => "p_false_hearing",
            Metric::PDamage => "p_damage",
            Metric::LinkBudget => "link_budget",
        }
    }

    /// Names of the metric-specific columns that follow `value` and
    /// `err_bound`.
    pub fn extra_columns(self) -> &'static [&'static str] {
        match self {
            Metric::PHearing | Metric::PDamage => &["ci_low", "ci_high"],
            Metric::PFalseHearing => &["gamma_closed_form"],
            Metric::MeanFlux | Metric::LinkBudget => &[],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    /// Dotted config path, e.g. `beam.sigma_s_mm`.
    pub path: String,
    /// Values in the config file's units.
    pub values: Vec<f64>,
}

/// Monte Carlo budget overriding the config's.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McBudget {
    pub samples: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis1: Axis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis2: Option<Axis>,
    pub metric: Metric,
    #[serde(default = "default_method")]
    pub method: FluxMethod,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc: Option<McBudget>,
}

fn default_method() -> FluxMethod {
    FluxMethod::Quadrature
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::config(format!("sweep line {} column {}", e.line(), e.column()), e.to_string()))
    }

    pub fn axes(&self) -> Vec<&Axis> {
        std::iter::once(&self.axis1).chain(self.axis2.as_ref()).collect()
    }

    /// Check the axes against `base`: nonempty, finite, strictly monotone,
    /// and naming numeric config fields.
    pub fn validate(&self, base: &LinkConfig) -> Result<()> {
        for (name, axis) in [("axis1", Some(&self.axis1)), ("axis2", self.axis2.as_ref())] {
            let Some(axis) = axis else { continue };
            let here = |field: &str| format!("{name}.{field}");
            if axis.values.is_empty() {
                return Err(Error::config(here("values"), "must not be empty"));
            }
            if axis.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::config(here("values"), "must be finite"));
            }
            let increasing = axis.values.windows(2).all(|w| w[1] > w[0]);
            let decreasing = axis.values.windows(2).all(|w| w[1] < w[0]);
            if !(increasing || decreasing) {
                return Err(Error::config(here("values"), "must be strictly monotone"));
            }
            base.get(&axis.path).map_err(|e| Error::config(here("path"), e.to_string()))?;
        }
        if let Some(a2) = &self.axis2 {
            if a2.path == self.axis1.path {
                return Err(Error::config("axis2.path", "must differ from axis1.path"));
            }
        }
        if let Some(mc) = self.mc {
            if mc.samples < 10_000 {
                return Err(Error::config("mc.samples", "must be >= 10000"));
            }
        }
        Ok(())
    }
}

/// Value of a metric at one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricValue {
    pub value: f64,
    pub err_bound: f64,
    /// Values for [`Metric::extra_columns`], in order.
    pub extras: Vec<f64>,
    pub method: &'static str,
    pub n_samples: Option<u64>,
    pub seed: Option<u64>,
}

pub fn evaluate(
    cfg: &LinkConfig,
    metric: Metric,
    method: FluxMethod,
    strict: bool,
    exec: Execution,
) -> Result<MetricValue> {
    let (n, seed) = (cfg.mc.samples, cfg.mc.seed);
    let flux = |scale: f64| -> Result<MetricValue> {
        let est = mean_flux(cfg, method, strict, exec)?;
        Ok(MetricValue {
            value: est.value * scale,
            err_bound: est.err_bound * scale,
            extras: Vec::new(),
            method: est.method.as_str(),
            n_samples: est.n_samples,
            seed: est.seed,
        })
    };
    let probability = |threshold: f64| -> Result<MetricValue> {
        let p = threshold_probabilities(cfg, &[threshold], n, seed, exec)?[0];
        Ok(MetricValue {
            value: p.p,
            err_bound: 0.5 * (p.ci_high - p.ci_low),
            extras: vec![p.ci_low, p.ci_high],
            method: FluxMethod::MonteCarlo.as_str(),
            n_samples: Some(n),
            seed: Some(seed),
        })
    };
    match metric {
        Metric::MeanFlux => flux(1.0),
        Metric::LinkBudget => flux(link_budget(1.0, &cfg.neural)),
        Metric::PHearing => probability(cfg.neural.y_th),
        Metric::PDamage => probability(cfg.neural.d_th),
        Metric::PFalseHearing => {
            let fh = p_false_hearing(&cfg.neural)?;
            Ok(MetricValue {
                value: fh.literal,
                err_bound: 0.0,
                extras: vec![fh.gamma_closed_form],
                method: "exact",
                n_samples: None,
                seed: None,
            })
        }
    }
}

#[derive(Debug)]
pub struct SweepRow {
    /// Axis values, axis1 first.
    pub coords: Vec<f64>,
    pub outcome: Result<MetricValue>,
}

#[derive(Debug)]
pub struct SweepResult {
    pub spec: SweepSpec,
    /// Grid in row-major order: axis1 outer, axis2 inner.
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn failures(&self) -> impl Iterator<Item = &Error> {
        self.rows.iter().filter_map(|r| r.outcome.as_ref().err())
    }
}

/// Evaluate the metric at every grid point. Invalid specs are rejected
/// up front; a point that fails (an invalid value for that field or a
/// numerical failure) is recorded in its row and the sweep continues.
pub fn run_sweep(base: &LinkConfig, spec: &SweepSpec, strict: bool, exec: Execution) -> Result<SweepResult> {
    spec.validate(base)?;
    let base = match spec.mc {
        Some(mc) => base.with_mc(mc.samples, mc.seed)?,
        None => base.clone(),
    };
    let inner: &[f64] = spec.axis2.as_ref().map_or(&[f64::NAN], |a| &a.values);
    let grid: Vec<Vec<f64>> = spec
        .axis1
        .values
        .iter()
        .flat_map(|&v1| inner.iter().map(move |&v2| if v2.is_nan() { vec![v1] } else { vec![v1, v2] }))
        .collect();
    let axes = spec.axes();
    // points run in parallel and each evaluates sequentially, so the work
    // is not split twice
    let point_exec = if grid.len() > 1 { Execution::Sequential } else { exec };
    let rows = exec.map(grid.len(), |i| {
        let coords = grid[i].clone();
        let outcome = axes
            .iter()
            .zip(&coords)
            .try_fold(base.clone(), |cfg, (axis, &v)| cfg.with_value(&axis.path, v))
            .and_then(|cfg| evaluate(&cfg, spec.metric, spec.method, strict, point_exec));
        SweepRow { coords, outcome }
    });
    Ok(SweepResult { spec: spec.clone(), rows })
}
