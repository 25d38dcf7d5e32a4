//! Minimal standalone SVG charts: line charts and grouped bar histograms.
//!
//! Output depends only on the input data. Coordinates are printed with two
//! decimals.

use std::fmt::Write as _;
use std::path::Path;

use super::ReportError;

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Series {
            name: name.into(),
            points,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlotKind {
    Line,
    /// One bar group per category; series `i` supplies bar `i` of every group
    /// through points `(category_index, value)`.
    GroupedBars { categories: Vec<String> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotStyle {
    pub kind: PlotKind,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Plot `log10(y)`; non-positive values are clamped to the smallest
    /// positive value present.
    pub log_y: bool,
}

impl PlotStyle {
    pub fn line(title: &str, x_label: &str, y_label: &str) -> Self {
        PlotStyle {
            kind: PlotKind::Line,
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            log_y: false,
        }
    }

    pub fn grouped_bars(title: &str, x_label: &str, y_label: &str, categories: Vec<String>) -> Self {
        PlotStyle {
            kind: PlotKind::GroupedBars { categories },
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            log_y: false,
        }
    }
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn span(lo: f64, hi: f64) -> (f64, f64) {
    if !(lo.is_finite() && hi.is_finite()) {
        return (0.0, 1.0);
    }
    if (hi - lo).abs() < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

/// Renders a chart to an SVG string.
pub fn render_svg(series: &[Series], style: &PlotStyle) -> Result<String, ReportError> {
    if series.is_empty() {
        return Err(ReportError::EmptySeries);
    }
    let min_pos = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1))
        .filter(|&y| y > 0.0)
        .fold(f64::INFINITY, f64::min);
    let ty = |y: f64| -> f64 {
        if style.log_y {
            let floor = if min_pos.is_finite() { min_pos } else { 1.0 };
            y.max(floor).log10()
        } else {
            y
        }
    };

    let ys = series.iter().flat_map(|s| s.points.iter().map(|p| ty(p.1)));
    let (mut y_lo, mut y_hi) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| (a.min(y), b.max(y)));
    let (x_lo, x_hi) = match &style.kind {
        PlotKind::Line => {
            let xs = series.iter().flat_map(|s| s.points.iter().map(|p| p.0));
            span_of(xs)
        }
        PlotKind::GroupedBars { categories } => {
            if !style.log_y {
                y_lo = y_lo.min(0.0);
            }
            (-0.5, categories.len() as f64 - 0.5)
        }
    };
    if !style.log_y && y_lo >= 0.0 {
        y_lo = 0.0;
    }
    (y_lo, y_hi) = span(y_lo, y_hi);
    let (x_lo, x_hi) = span(x_lo, x_hi);

    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * pw;
    let sy = |y: f64| TOP + ph - (y - y_lo) / (y_hi - y_lo) * ph;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + pw / 2.0,
        escape(&style.title)
    );

    // axes
    let _ = writeln!(
        out,
        r#"<g class="axes" stroke="black" stroke-width="1"><line x1="{l:.2}" y1="{b:.2}" x2="{r:.2}" y2="{b:.2}"/><line x1="{l:.2}" y1="{t:.2}" x2="{l:.2}" y2="{b:.2}"/></g>"#,
        l = LEFT,
        r = LEFT + pw,
        t = TOP,
        b = TOP + ph
    );
    for i in 0..=5 {
        let v = y_lo + (y_hi - y_lo) * i as f64 / 5.0;
        let label = if style.log_y { format!("1e{v:.1}") } else { format!("{v:.3}") };
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            sy(v) + 4.0,
            label
        );
    }
    match &style.kind {
        PlotKind::Line => {
            for i in 0..=5 {
                let v = x_lo + (x_hi - x_lo) * i as f64 / 5.0;
                let _ = writeln!(
                    out,
                    r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{v:.0}</text>"#,
                    sx(v),
                    TOP + ph + 18.0
                );
            }
        }
        PlotKind::GroupedBars { categories } => {
            for (i, c) in categories.iter().enumerate() {
                let _ = writeln!(
                    out,
                    r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                    sx(i as f64),
                    TOP + ph + 18.0,
                    escape(c)
                );
            }
        }
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 16.0,
        escape(&style.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(&style.y_label)
    );

    match &style.kind {
        PlotKind::Line => {
            for (i, s) in series.iter().enumerate() {
                let pts: Vec<String> = s
                    .points
                    .iter()
                    .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(ty(y))))
                    .collect();
                let _ = writeln!(
                    out,
                    r#"<polyline fill="none" stroke="{}" stroke-width="2" points="{}"/>"#,
                    PALETTE[i % PALETTE.len()],
                    pts.join(" ")
                );
            }
        }
        PlotKind::GroupedBars { .. } => {
            let group_w = pw / (x_hi - x_lo) * 0.8;
            let bar_w = group_w / series.len() as f64;
            let base = sy(if style.log_y { y_lo } else { 0.0_f64.max(y_lo) });
            for (i, s) in series.iter().enumerate() {
                for &(x, y) in &s.points {
                    let left = sx(x) - group_w / 2.0 + bar_w * i as f64;
                    let top = sy(ty(y));
                    let (y0, h) = if top <= base { (top, base - top) } else { (base, top - base) };
                    let _ = writeln!(
                        out,
                        r#"<rect class="bar" x="{left:.2}" y="{y0:.2}" width="{bar_w:.2}" height="{h:.2}" fill="{}"/>"#,
                        PALETTE[i % PALETTE.len()]
                    );
                }
            }
        }
    }

    let _ = writeln!(out, r#"<g class="legend">"#);
    for (i, s) in series.iter().enumerate() {
        let y = TOP + 10.0 + 20.0 * i as f64;
        let x = LEFT + pw + 15.0;
        let _ = writeln!(
            out,
            r#"<rect x="{x:.2}" y="{:.2}" width="12" height="12" fill="{}"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            y - 10.0,
            PALETTE[i % PALETTE.len()],
            x + 18.0,
            y,
            escape(&s.name)
        );
    }
    let _ = writeln!(out, "</g>");
    out.push_str("</svg>\n");
    Ok(out)
}

fn span_of(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)))
}

pub fn emit_svg_plot(series: &[Series], style: &PlotStyle, path: &Path) -> Result<(), ReportError> {
    let svg = render_svg(series, style)?;
    std::fs::write(path, svg).map_err(|e| ReportError::io(path, e))
}
