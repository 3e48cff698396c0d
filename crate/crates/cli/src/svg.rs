//! Small self-contained SVG charts.

use std::fmt::Write;

use crate::output::num;

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 70.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Markers,
    Line,
    /// Larger marker drawn on top, for the query point.
    Highlight,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub style: Style,
    /// Plot against the right-hand axis.
    pub secondary: bool,
    /// Reuse another series' colour.
    pub color_of: Option<usize>,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>, style: Style) -> Self {
        Self {
            label: label.into(),
            points,
            style,
            secondary: false,
            color_of: None,
        }
    }

    pub fn secondary(mut self) -> Self {
        self.secondary = true;
        self
    }

    pub fn colored_like(mut self, i: usize) -> Self {
        self.color_of = Some(i);
        self
    }
}

pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub y2_label: Option<String>,
    pub series: Vec<Series>,
}

#[derive(Clone, Copy)]
struct Range(f64, f64);

impl Range {
    fn of<'a>(values: impl Iterator<Item = &'a f64>) -> Range {
        let (lo, hi) = values
            .filter(|v| v.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        if !lo.is_finite() {
            return Range(0.0, 1.0);
        }
        let pad = if hi > lo {
            0.05 * (hi - lo)
        } else {
            0.5 * lo.abs().max(1e-3)
        };
        Range(lo - pad, hi + pad)
    }

    fn map(self, v: f64, from: f64, to: f64) -> f64 {
        from + (v - self.0) / (self.1 - self.0) * (to - from)
    }

    fn ticks(self) -> impl Iterator<Item = f64> {
        (0..=4).map(move |i| self.0 + (self.1 - self.0) * i as f64 / 4.0)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn tick_label(v: f64) -> String {
    let s = num(v);
    if s.contains('e') {
        return s;
    }
    match s.split_once('.') {
        Some((int, frac)) if frac.len() > 4 => format!("{int}.{}", &frac[..4]),
        _ => s,
    }
}

impl Chart {
    pub fn render(&self) -> String {
        let (x0, x1, y0, y1) = (LEFT, W - RIGHT, H - BOTTOM, TOP);
        let xs = Range::of(
            self.series
                .iter()
                .flat_map(|s| s.points.iter().map(|p| &p.0)),
        );
        let pick = |secondary: bool| {
            Range::of(
                self.series
                    .iter()
                    .filter(|s| s.secondary == secondary)
                    .flat_map(|s| s.points.iter().map(|p| &p.1)),
            )
        };
        let (ys, ys2) = (pick(false), pick(true));

        let mut out = String::new();
        writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
        )
        .unwrap();
        writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
        writeln!(
            out,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
            W / 2.0,
            escape(&self.title)
        )
        .unwrap();
        writeln!(
            out,
            r#"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            x1 - x0,
            y0 - y1
        )
        .unwrap();

        for t in xs.ticks() {
            let x = xs.map(t, x0, x1);
            writeln!(
                out,
                r#"<line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{}" stroke="black"/>"#,
                y0 + 5.0
            )
            .unwrap();
            writeln!(
                out,
                r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#,
                y0 + 18.0,
                tick_label(t)
            )
            .unwrap();
        }
        for t in ys.ticks() {
            let y = ys.map(t, y0, y1);
            writeln!(
                out,
                r#"<line x1="{}" y1="{y:.2}" x2="{x0}" y2="{y:.2}" stroke="black"/>"#,
                x0 - 5.0
            )
            .unwrap();
            writeln!(
                out,
                r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
                x0 - 8.0,
                y + 4.0,
                tick_label(t)
            )
            .unwrap();
        }
        if self.y2_label.is_some() {
            for t in ys2.ticks() {
                let y = ys2.map(t, y0, y1);
                writeln!(
                    out,
                    r#"<line x1="{x1}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="black"/>"#,
                    x1 + 5.0
                )
                .unwrap();
                writeln!(
                    out,
                    r#"<text x="{}" y="{:.2}">{}</text>"#,
                    x1 + 8.0,
                    y + 4.0,
                    tick_label(t)
                )
                .unwrap();
            }
        }
        writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            (x0 + x1) / 2.0,
            H - 12.0,
            escape(&self.x_label)
        )
        .unwrap();
        writeln!(
            out,
            r#"<text transform="translate(18 {}) rotate(-90)" text-anchor="middle">{}</text>"#,
            (y0 + y1) / 2.0,
            escape(&self.y_label)
        )
        .unwrap();
        if let Some(label) = &self.y2_label {
            writeln!(
                out,
                r#"<text transform="translate({} {}) rotate(90)" text-anchor="middle">{}</text>"#,
                W - 14.0,
                (y0 + y1) / 2.0,
                escape(label)
            )
            .unwrap();
        }

        let mut legend = 0;
        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[s.color_of.unwrap_or(i) % PALETTE.len()];
            let yr = if s.secondary { ys2 } else { ys };
            let pts: Vec<(f64, f64)> = s
                .points
                .iter()
                .filter(|p| p.0.is_finite() && p.1.is_finite())
                .map(|&(x, y)| (xs.map(x, x0, x1), yr.map(y, y0, y1)))
                .collect();
            match s.style {
                Style::Line => {
                    let path: Vec<String> =
                        pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                    writeln!(
                        out,
                        r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
                        path.join(" ")
                    )
                    .unwrap();
                }
                Style::Markers => {
                    for (x, y) in pts {
                        writeln!(
                            out,
                            r#"<circle cx="{x:.2}" cy="{y:.2}" r="3.5" fill="{color}"/>"#
                        )
                        .unwrap();
                    }
                }
                Style::Highlight => {
                    for (x, y) in pts {
                        writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="7" fill="none" stroke="{color}" stroke-width="2.5"/>"#).unwrap();
                        writeln!(
                            out,
                            r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="{color}"/>"#
                        )
                        .unwrap();
                    }
                }
            }
            if s.color_of.is_none() {
                let ly = TOP + 16.0 + 16.0 * legend as f64;
                legend += 1;
                writeln!(
                    out,
                    r#"<rect x="{}" y="{}" width="10" height="10" fill="{color}"/>"#,
                    x1 - 150.0,
                    ly - 9.0
                )
                .unwrap();
                writeln!(
                    out,
                    r#"<text x="{}" y="{ly}">{}</text>"#,
                    x1 - 135.0,
                    escape(&s.label)
                )
                .unwrap();
            }
        }
        out.push_str("</svg>\n");
        out
    }
}

/// `n` evenly spaced points of `f` over `[lo, hi]`.
pub fn sample(lo: f64, hi: f64, n: usize, f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            (x, f(x))
        })
        .collect()
}
