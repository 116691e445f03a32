//! Minimal SVG 1.1 line plots and heatmaps. Coordinates are printed with
//! fixed precision so identical data gives identical bytes.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f"];

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

#[derive(Debug, Clone, Default)]
pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_log: bool,
    pub y_log: bool,
    pub series: Vec<Series>,
    /// Labelled vertical markers, e.g. an exposure limit.
    pub markers: Vec<(f64, String)>,
}

#[derive(Debug, Clone, Default)]
pub struct Heatmap {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub z_label: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// `z[i][j]` at `(xs[i], ys[j])`; `None` cells are left blank.
    pub z: Vec<Vec<Option<f64>>>,
    pub z_log: bool,
}

struct Scale {
    lo: f64,
    hi: f64,
    log: bool,
    from: f64,
    to: f64,
}

impl Scale {
    fn new(values: impl Iterator<Item = f64>, log: bool, from: f64, to: f64) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite() && (!log || *v > 0.0)) {
            let v = if log { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo < 1e-12 * hi.abs().max(1.0) {
            (lo, hi) = (lo - 0.5, hi + 0.5);
        }
        Scale { lo, hi, log, from, to }
    }

    fn map(&self, v: f64) -> Option<f64> {
        if self.log && v <= 0.0 || !v.is_finite() {
            return None;
        }
        let v = if self.log { v.log10() } else { v };
        Some(self.from + (v - self.lo) / (self.hi - self.lo) * (self.to - self.from))
    }

    /// Widen a linear range to whole tick steps.
    fn nice(mut self) -> Self {
        if !self.log {
            let step = self.step();
            self.lo = (self.lo / step + 1e-9).floor() * step;
            self.hi = (self.hi / step - 1e-9).ceil() * step;
        }
        self
    }

    fn step(&self) -> f64 {
        let raw = (self.hi - self.lo) / 5.0;
        let mag = 10f64.powf(raw.log10().floor());
        [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag)
    }

    fn ticks(&self) -> Vec<f64> {
        if self.log {
            let (a, b) = (self.lo.ceil() as i32, self.hi.floor() as i32);
            let step = ((b - a) / 6 + 1).max(1) as usize;
            return (a..=b).step_by(step).map(|e| 10f64.powi(e)).collect();
        }
        let step = self.step();
        let first = (self.lo / step).ceil() as i64;
        let last = (self.hi / step + 1e-9).floor() as i64;
        (first..=last).map(|k| k as f64 * step).collect()
    }
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if !(1e-3..1e4).contains(&a) {
        return format!("{v:.0e}");
    }
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">
<rect width="100%" height="100%" fill="white"/>
<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        escape(title)
    );
}

/// Insert a `<desc>` element (provenance) right after the opening tag.
pub fn with_desc(svg: &str, desc: &str) -> String {
    let background = "<rect width=\"100%\"";
    svg.replacen(background, &format!("<desc>{}</desc>\n{background}", escape(desc)), 1)
}

fn axes(out: &mut String, xs: &Scale, ys: &Scale, x_label: &str, y_label: &str) {
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    let _ = writeln!(
        out,
        r#"<rect x="{x0}" y="{y1}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y0 - y1
    );
    for t in xs.ticks() {
        let Some(x) = xs.map(t) else { continue };
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{:.1}" stroke="black"/><text x="{x:.2}" y="{:.1}" text-anchor="middle">{}</text>"#,
            y0 + 5.0,
            y0 + 18.0,
            fmt_tick(t)
        );
    }
    for t in ys.ticks() {
        let Some(y) = ys.map(t) else { continue };
        let _ = writeln!(
            out,
            r#"<line x1="{:.1}" y1="{y:.2}" x2="{x0}" y2="{y:.2}" stroke="black"/><text x="{:.1}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            y + 4.0,
            fmt_tick(t)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>
<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 18.0,
        escape(x_label),
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    );
}

pub fn line_plot(p: &LinePlot) -> String {
    let points = || p.series.iter().flat_map(|s| s.points.iter());
    let xs = Scale::new(points().map(|q| q.0), p.x_log, LEFT, WIDTH - RIGHT).nice();
    let ys = Scale::new(points().map(|q| q.1), p.y_log, HEIGHT - BOTTOM, TOP).nice();
    let mut out = String::new();
    header(&mut out, &p.title);
    axes(&mut out, &xs, &ys, &p.x_label, &p.y_label);
    for (i, s) in p.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let path: Vec<String> =
            s.points.iter().filter_map(|&(x, y)| Some(format!("{:.2},{:.2}", xs.map(x)?, ys.map(y)?))).collect();
        let dash = if s.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
            path.join(" ")
        );
        for pt in &path {
            let (x, y) = pt.split_once(',').expect("formatted pair");
            let _ = writeln!(out, r#"<circle cx="{x}" cy="{y}" r="2.5" fill="{color}"/>"#);
        }
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = WIDTH - RIGHT + 12.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="1.5"{dash}/><text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    for (v, label) in &p.markers {
        let Some(x) = xs.map(*v) else { continue };
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.1}" stroke="black" stroke-dasharray="4 3"/><text x="{:.2}" y="{:.1}">{}</text>"#,
            HEIGHT - BOTTOM,
            x + 4.0,
            TOP + 12.0,
            escape(label)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Blue-to-yellow ramp.
fn ramp(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", lerp(68.0, 253.0), lerp(1.0, 231.0), lerp(84.0, 37.0))
}

/// Cell boundaries halfway between grid values, extrapolated at the ends.
fn cell_edges(v: &[f64]) -> Vec<f64> {
    if v.len() < 2 {
        let c = v.first().copied().unwrap_or(0.0);
        return vec![c - 0.5, c + 0.5];
    }
    let n = v.len();
    let mut e = vec![v[0] - 0.5 * (v[1] - v[0])];
    e.extend(v.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    e.push(v[n - 1] + 0.5 * (v[n - 1] - v[n - 2]));
    e
}

pub fn heatmap(h: &Heatmap) -> String {
    let (ex, ey) = (cell_edges(&h.xs), cell_edges(&h.ys));
    let xs = Scale::new(ex.iter().copied(), false, LEFT, WIDTH - RIGHT);
    let ys = Scale::new(ey.iter().copied(), false, HEIGHT - BOTTOM, TOP);
    let zs = Scale::new(h.z.iter().flatten().flatten().copied(), h.z_log, 0.0, 1.0);
    let px: Vec<f64> = ex.iter().filter_map(|&e| xs.map(e)).collect();
    let py: Vec<f64> = ey.iter().filter_map(|&e| ys.map(e)).collect();
    let mut out = String::new();
    header(&mut out, &h.title);
    for (i, col) in h.z.iter().enumerate() {
        for (j, z) in col.iter().enumerate() {
            let Some(t) = z.and_then(|z| zs.map(z)) else { continue };
            let (xa, xb) = (px[i].min(px[i + 1]), px[i].max(px[i + 1]));
            let (ya, yb) = (py[j].min(py[j + 1]), py[j].max(py[j + 1]));
            let _ = writeln!(
                out,
                r#"<rect x="{xa:.2}" y="{ya:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                xb - xa,
                yb - ya,
                ramp(t)
            );
        }
    }
    axes(&mut out, &xs, &ys, &h.x_label, &h.y_label);
    let (bx, by, bh) = (WIDTH - RIGHT + 30.0, TOP, HEIGHT - BOTTOM - TOP);
    for k in 0..50 {
        let t = k as f64 / 49.0;
        let _ = writeln!(
            out,
            r#"<rect x="{bx:.1}" y="{:.2}" width="18" height="{:.2}" fill="{}"/>"#,
            by + bh * (1.0 - t) - bh / 50.0,
            bh / 50.0 + 0.5,
            ramp(t)
        );
    }
    let z_at = |t: f64| {
        let v = zs.lo + t * (zs.hi - zs.lo);
        if h.z_log {
            10f64.powf(v)
        } else {
            v
        }
    };
    for (t, anchor) in [(0.0, by + bh), (0.5, by + bh / 2.0), (1.0, by + 10.0)] {
        let _ = writeln!(out, r#"<text x="{:.1}" y="{anchor:.1}">{}</text>"#, bx + 24.0, fmt_sig(z_at(t)));
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" transform="rotate(-90 {:.1} {:.1})">{}</text>"#,
        bx + 100.0,
        by + bh / 2.0,
        bx + 100.0,
        by + bh / 2.0,
        escape(&h.z_label)
    );
    out.push_str("</svg>\n");
    out
}

fn fmt_sig(v: f64) -> String {
    if v != 0.0 && !(1e-3..1e4).contains(&v.abs()) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_ticks_are_round() {
        let s = Scale::new([0.0, 0.93].into_iter(), false, 0.0, 1.0);
        assert_eq!(s.ticks(), vec![0.0, 0.2, 0.4, 0.6000000000000001, 0.8]);
    }

    #[test]
    fn log_axis_drops_nonpositive() {
        let s = Scale::new([0.0, 1e-3, 10.0].into_iter(), true, 0.0, 1.0);
        assert_eq!(s.map(0.0), None);
        assert_eq!(s.ticks(), vec![1e-3, 1e-2, 1e-1, 1.0, 10.0]);
    }

    #[test]
    fn plots_are_well_formed() {
        let p = LinePlot {
            title: "a < b".into(),
            series: vec![Series { label: "s".into(), points: vec![(1.0, 2.0), (2.0, 3.0)], dashed: false }],
            markers: vec![(1.5, "limit".into())],
            ..Default::default()
        };
        let svg = line_plot(&p);
        assert!(svg.starts_with("<?xml") && svg.ends_with("</svg>\n"));
        assert!(svg.contains("a &lt; b") && svg.contains("<polyline"));
        let stamped = with_desc(&svg, "seed=1 & more");
        assert!(stamped.contains("<desc>seed=1 &amp; more</desc>\n<rect width"));
        let h =
            Heatmap { xs: vec![1.0, 2.0], ys: vec![3.0], z: vec![vec![Some(1.0)], vec![None]], ..Default::default() };
        assert_eq!(heatmap(&h).matches("<rect").count(), 1 + 1 + 1 + 50);
    }
}
