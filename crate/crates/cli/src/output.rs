//! CSV and SVG rendering of sweep results.

use aoci_core::sweep::{SweepResult, SweepRow};

use crate::presets::PlotStyle;
use crate::svg::{self, Heatmap, LinePlot, Series};

/// Column names: a function of the metric and the number of axes only.
pub fn sweep_header(result: &SweepResult) -> Vec<String> {
    let spec = &result.spec;
    let mut cols: Vec<String> = spec.axes().iter().map(|a| a.path.clone()).collect();
    cols.push(spec.metric.as_str().into());
    cols.push("err_bound".into());
    cols.extend(spec.metric.extra_columns().iter().map(|c| c.to_string()));
    cols.extend(["method", "n_samples", "seed", "config_hash", "error"].map(String::from));
    cols
}

fn row_fields(row: &SweepRow, n_extra: usize, config_hash: &str) -> Vec<String> {
    let mut f: Vec<String> = row.coords.iter().map(|v| v.to_string()).collect();
    match &row.outcome {
        Ok(m) => {
            f.push(m.value.to_string());
            f.push(m.err_bound.to_string());
            f.extend(m.extras.iter().map(|v| v.to_string()));
            f.push(m.method.into());
            f.push(m.n_samples.map(|n| n.to_string()).unwrap_or_default());
            f.push(m.seed.map(|s| s.to_string()).unwrap_or_default());
            f.push(config_hash.into());
            f.push(String::new());
        }
        Err(e) => {
            f.extend(std::iter::repeat_n(String::new(), 2 + n_extra + 3));
            f.push(config_hash.into());
            f.push(e.to_string());
        }
    }
    f
}

/// RFC 4180 CSV with LF line ends, one row per grid point in grid order.
pub fn sweep_csv(result: &SweepResult, config_hash: &str) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(sweep_header(result))?;
    let n_extra = result.spec.metric.extra_columns().len();
    for row in &result.rows {
        w.write_record(row_fields(row, n_extra, config_hash))?;
    }
    Ok(w.into_inner()?)
}

pub fn axis_label(path: &str) -> String {
    match path {
        "skin.delta_mm" => "skin thickness (mm)".into(),
        "beam.theta_deg" => "divergence angle (deg)".into(),
        "beam.sigma_s_mm" => "pointing jitter sigma_s (mm)".into(),
        "source.power_mw" => "transmit power (mW)".into(),
        "coupling.omega0_mm" => "mode-field radius (mm)".into(),
        other => other.into(),
    }
}

/// Short name and unit of a config path, for legends.
pub fn axis_symbol(path: &str) -> (&str, &str) {
    match path {
        "skin.delta_mm" => ("δ", "mm"),
        "beam.theta_deg" => ("θ", "deg"),
        "beam.sigma_s_mm" => ("σ_s", "mm"),
        "source.power_mw" => ("x", "mW"),
        "coupling.omega0_mm" => ("ω₀", "mm"),
        other => (other, ""),
    }
}

pub fn metric_label(metric: &str) -> String {
    match metric {
        "mean_flux" => "mean photon flux (photons/s)".into(),
        "link_budget" => "mean photons per window".into(),
        "p_hearing" => "hearing probability".into(),
        "p_damage" => "damage probability".into(),
        "p_false_hearing" => "false-hearing probability".into(),
        other => other.into(),
    }
}

/// Curves (one per axis1 value, or a single curve for a one-axis sweep)
/// of the metric over the innermost axis.
pub fn curves(result: &SweepResult, dashed: bool) -> Vec<Series> {
    let spec = &result.spec;
    let Some(inner) = &spec.axis2 else {
        let points = result.rows.iter().filter_map(|r| Some((r.coords[0], r.outcome.as_ref().ok()?.value))).collect();
        return vec![Series { label: spec.metric.as_str().into(), points, dashed }];
    };
    let n = inner.values.len();
    spec.axis1
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| Series {
            label: {
                let (sym, unit) = axis_symbol(&spec.axis1.path);
                format!("{sym} = {v} {unit}").trim_end().to_string()
            },
            points: result.rows[i * n..(i + 1) * n]
                .iter()
                .filter_map(|r| Some((r.coords[1], r.outcome.as_ref().ok()?.value)))
                .collect(),
            dashed,
        })
        .collect()
}

pub fn heatmap(result: &SweepResult, title: &str) -> Heatmap {
    let spec = &result.spec;
    let ys = spec.axis2.as_ref().map_or(vec![0.0], |a| a.values.clone());
    let n = ys.len();
    Heatmap {
        title: title.into(),
        x_label: axis_label(&spec.axis1.path),
        y_label: spec.axis2.as_ref().map_or(String::new(), |a| axis_label(&a.path)),
        z_label: metric_label(spec.metric.as_str()),
        xs: spec.axis1.values.clone(),
        ys,
        z: result
            .rows
            .chunks(n)
            .map(|col| col.iter().map(|r| r.outcome.as_ref().ok().map(|m| m.value)).collect())
            .collect(),
        z_log: false,
    }
}

/// Default rendering for `aoci sweep`: a line plot for one axis, a heatmap
/// for two.
pub fn sweep_svg(result: &SweepResult, title: &str) -> String {
    render(
        result,
        title,
        if result.spec.axis2.is_some() { PlotStyle::Heatmap } else { PlotStyle::Curves { x_log: false, y_log: false } },
    )
}

pub fn render(result: &SweepResult, title: &str, style: PlotStyle) -> String {
    match style {
        PlotStyle::Heatmap => svg::heatmap(&heatmap(result, title)),
        PlotStyle::Curves { x_log, y_log } => {
            let spec = &result.spec;
            let inner = spec.axis2.as_ref().unwrap_or(&spec.axis1);
            svg::line_plot(&LinePlot {
                title: title.into(),
                x_label: axis_label(&inner.path),
                y_label: metric_label(spec.metric.as_str()),
                x_log,
                y_log,
                series: curves(result, false),
                markers: Vec::new(),
            })
        }
    }
}
