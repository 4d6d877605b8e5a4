//! Minimal line-plot SVG writer.
//!
//! Every plotted point is emitted as a marker carrying its exact data
//! coordinates in `data-x` / `data-y`, so a plot can be checked against the
//! CSV it was drawn from.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::io::fmt_f64;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_L: f64 = 72.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 36.0;
const MARGIN_B: f64 = 52.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.into(),
            points,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Axes {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
}

struct Scale {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Scale {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            let v = if log { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        } else if hi - lo < 1e-12 * (1.0 + lo.abs()) {
            let pad = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
            (lo, hi) = (lo - pad, hi + pad);
        }
        Self { lo, hi, log }
    }

    /// Position in `[0, 1]`.
    fn unit(&self, v: f64) -> f64 {
        let v = if self.log { v.log10() } else { v };
        (v - self.lo) / (self.hi - self.lo)
    }

    fn ticks(&self) -> Vec<f64> {
        (0..=4)
            .map(|k| {
                let v = self.lo + (self.hi - self.lo) * k as f64 / 4.0;
                if self.log {
                    10f64.powf(v)
                } else {
                    v
                }
            })
            .collect()
    }
}

fn usable(p: &(f64, f64), axes: &Axes) -> bool {
    p.0.is_finite() && p.1.is_finite() && (!axes.log_x || p.0 > 0.0) && (!axes.log_y || p.1 > 0.0)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Renders the series as a line plot. Points that cannot be drawn (non-finite,
/// or non-positive on a log axis) are skipped; with nothing drawable the
/// output contains the axes only.
pub fn render_svg(series: &[Series], axes: &Axes) -> String {
    let drawable = || {
        series
            .iter()
            .flat_map(|s| s.points.iter().filter(|p| usable(p, axes)))
    };
    let xs = Scale::fit(drawable().map(|p| p.0), axes.log_x);
    let ys = Scale::fit(drawable().map(|p| p.1), axes.log_y);
    let pw = WIDTH - MARGIN_L - MARGIN_R;
    let ph = HEIGHT - MARGIN_T - MARGIN_B;
    let px = |x: f64| MARGIN_L + pw * xs.unit(x);
    let py = |y: f64| MARGIN_T + ph * (1.0 - ys.unit(y));

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="13">{}</text>"#,
        MARGIN_L + pw / 2.0,
        escape(&axes.title)
    );
    let _ = writeln!(
        out,
        r#"<g class="axes" stroke="black" fill="none"><line x1="{MARGIN_L}" y1="{0}" x2="{1}" y2="{0}"/><line x1="{MARGIN_L}" y1="{MARGIN_T}" x2="{MARGIN_L}" y2="{0}"/></g>"#,
        MARGIN_T + ph,
        MARGIN_L + pw
    );
    for v in xs.ticks() {
        let x = MARGIN_L + pw * xs.unit(v);
        let _ = writeln!(
            out,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{v:.3e}</text>"#,
            MARGIN_T + ph + 16.0
        );
    }
    for v in ys.ticks() {
        let y = MARGIN_T + ph * (1.0 - ys.unit(v));
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{v:.3e}</text>"#,
            MARGIN_L - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        MARGIN_L + pw / 2.0,
        HEIGHT - 10.0,
        escape(&axes.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{0}" text-anchor="middle" transform="rotate(-90 14 {0})">{1}</text>"#,
        MARGIN_T + ph / 2.0,
        escape(&axes.y_label)
    );

    for (k, s) in series.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let pts: Vec<&(f64, f64)> = s.points.iter().filter(|p| usable(p, axes)).collect();
        let _ = writeln!(
            out,
            r#"<g class="series" data-label="{}">"#,
            escape(&s.label)
        );
        if pts.len() > 1 {
            let path: Vec<String> = pts
                .iter()
                .map(|p| format!("{:.2},{:.2}", px(p.0), py(p.1)))
                .collect();
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
                path.join(" ")
            );
        }
        for p in &pts {
            let _ = writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{colour}" data-x="{}" data-y="{}"/>"#,
                px(p.0),
                py(p.1),
                fmt_f64(p.0),
                fmt_f64(p.1)
            );
        }
        let ly = MARGIN_T + 14.0 * k as f64 + 8.0;
        let lx = WIDTH - MARGIN_R + 12.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{colour}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            lx + 18.0,
            lx + 24.0,
            ly + 4.0,
            escape(&s.label)
        );
        let _ = writeln!(out, "</g>");
    }
    out.push_str("</svg>\n");
    out
}

pub fn write_svg(series: &[Series], axes: &Axes, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, render_svg(series, axes))?;
    Ok(())
}

/// Recovers `(label, points)` from the marker attributes of a rendered plot.
pub fn parse_svg_points(svg: &str) -> Result<Vec<Series>> {
    fn attr<'a>(tag: &'a str, name: &str) -> Option<&'a str> {
        let key = format!("{name}=\"");
        let start = tag.find(&key)? + key.len();
        let len = tag[start..].find('"')?;
        Some(&tag[start..start + len])
    }
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|e| Error::Parse(format!("svg value `{s}`: {e}")))
    };
    let mut out: Vec<Series> = Vec::new();
    for line in svg.lines() {
        let line = line.trim();
        if line.starts_with("<g class=\"series\"") {
            let label = attr(line, "data-label").unwrap_or_default();
            out.push(Series::new(label, Vec::new()));
        } else if line.starts_with("<circle") {
            let (Some(x), Some(y)) = (attr(line, "data-x"), attr(line, "data-y")) else {
                continue;
            };
            out.last_mut()
                .ok_or_else(|| Error::Parse("marker outside a series group".into()))?
                .points
                .push((num(x)?, num(y)?));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_series_gives_axes_only() {
        let svg = render_svg(&[], &Axes::default());
        assert!(svg.contains("class=\"axes\""));
        assert!(!svg.contains("<circle"));
        assert!(svg.trim_end().ends_with("</svg>"));
        let svg = render_svg(&[Series::new("e", vec![])], &Axes::default());
        assert!(!svg.contains("<polyline"));
    }

    #[test]
    fn single_point_is_a_marker() {
        let svg = render_svg(&[Series::new("one", vec![(2.0, 3.0)])], &Axes::default());
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(!svg.contains("<polyline"));
    }

    #[test]
    fn log_axis_skips_non_positive() {
        let axes = Axes {
            log_y: true,
            ..Axes::default()
        };
        let s = Series::new("a", vec![(1.0, 1e-3), (2.0, 0.0), (3.0, 1e-5)]);
        let back = parse_svg_points(&render_svg(&[s], &axes)).unwrap();
        assert_eq!(back[0].points, vec![(1.0, 1e-3), (3.0, 1e-5)]);
    }

    #[test]
    fn markers_round_trip_exactly() {
        let s = vec![
            Series::new("x<y", vec![(0.1, 1.0 / 3.0), (0.2, std::f64::consts::PI)]),
            Series::new("b", vec![(1.0, -2.5)]),
        ];
        let back = parse_svg_points(&render_svg(&s, &Axes::default())).unwrap();
        assert_eq!(back[0].points, s[0].points);
        assert_eq!(back[1].points, s[1].points);
        assert_eq!(back[1].label, "b");
    }
}
