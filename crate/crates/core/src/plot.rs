//! Minimal self-contained SVG charts for sweep output.

use std::fmt::Write;

use crate::norms::ErrorRecord;
use crate::problem::alpha_rate;
use crate::sweep::{AlphaRow, RateFit};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 55.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Linear,
    Log10,
}

impl Axis {
    fn map(self, v: f64) -> f64 {
        match self {
            Axis::Linear => v,
            Axis::Log10 => v.log10(),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Series {
    Points {
        label: String,
        data: Vec<(f64, f64)>,
    },
    Line {
        label: String,
        data: Vec<(f64, f64)>,
        dashed: bool,
    },
}

#[derive(Debug, Clone)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_axis: Axis,
    pub y_axis: Axis,
    pub series: Vec<Series>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Chart {
    pub fn to_svg(&self) -> String {
        let data = |s: &Series| match s {
            Series::Points { data, .. } | Series::Line { data, .. } => data.clone(),
        };
        let valid = |a: Axis, v: f64| v.is_finite() && (a == Axis::Linear || v > 0.0);
        let pts: Vec<(f64, f64)> = self
            .series
            .iter()
            .flat_map(data)
            .filter(|&(x, y)| valid(self.x_axis, x) && valid(self.y_axis, y))
            .map(|(x, y)| (self.x_axis.map(x), self.y_axis.map(y)))
            .collect();
        let range = |vals: Vec<f64>| {
            let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if !lo.is_finite() {
                (0.0, 1.0)
            } else if hi - lo < 1e-12 {
                (lo - 0.5, hi + 0.5)
            } else {
                let pad = 0.05 * (hi - lo);
                (lo - pad, hi + pad)
            }
        };
        let (x0, x1) = range(pts.iter().map(|p| p.0).collect());
        let (y0, y1) = range(pts.iter().map(|p| p.1).collect());
        let pw = WIDTH - MARGIN_L - MARGIN_R;
        let ph = HEIGHT - MARGIN_T - MARGIN_B;
        let sx = |x: f64| MARGIN_L + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| MARGIN_T + ph - (y - y0) / (y1 - y0) * ph;

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            MARGIN_L + pw / 2.0,
            HEIGHT - 12.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            svg,
            r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
            MARGIN_T + ph / 2.0,
            MARGIN_T + ph / 2.0,
            escape(&self.y_label)
        );

        for i in 0..=4 {
            let t = i as f64 / 4.0;
            let (xv, yv) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
            let label = |axis: Axis, v: f64| match axis {
                Axis::Linear => format!("{v:.3}"),
                Axis::Log10 => format!("{:.2e}", 10f64.powf(v)),
            };
            let _ = writeln!(
                svg,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
                sx(xv),
                MARGIN_T + ph + 18.0,
                label(self.x_axis, xv)
            );
            let _ = writeln!(
                svg,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
                MARGIN_L - 6.0,
                sy(yv) + 4.0,
                label(self.y_axis, yv)
            );
        }

        const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
        for (idx, series) in self.series.iter().enumerate() {
            let color = COLORS[idx % COLORS.len()];
            let mapped: Vec<(f64, f64)> = data(series)
                .into_iter()
                .filter(|&(x, y)| valid(self.x_axis, x) && valid(self.y_axis, y))
                .map(|(x, y)| (sx(self.x_axis.map(x)), sy(self.y_axis.map(y))))
                .collect();
            let label = match series {
                Series::Points { label, .. } => {
                    for (x, y) in &mapped {
                        let _ = writeln!(svg, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3.5" fill="{color}"/>"#);
                    }
                    label
                }
                Series::Line { label, dashed, .. } => {
                    let path: Vec<String> = mapped.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                    let dash = if *dashed { r#" stroke-dasharray="6 4""# } else { "" };
                    let _ = writeln!(
                        svg,
                        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
                        path.join(" ")
                    );
                    label
                }
            };
            let ly = MARGIN_T + 16.0 + 16.0 * idx as f64;
            let _ = writeln!(
                svg,
                r#"<text x="{:.1}" y="{ly:.1}" fill="{color}">{}</text>"#,
                MARGIN_L + 10.0,
                escape(label)
            );
        }
        svg.push_str("</svg>\n");
        svg
    }
}

/// Log-log plot of one norm against `eps` with the fitted power law over its window.
pub fn rate_chart(records: &[ErrorRecord], fit: &RateFit, fit_lo: i32, fit_hi: i32) -> Chart {
    let data: Vec<(f64, f64)> = records
        .iter()
        .filter_map(|r| r.get(fit.norm).map(|v| (r.epsilon, v)))
        .collect();
    let line: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.k >= fit_lo && r.k <= fit_hi)
        .map(|r| (r.epsilon, (fit.intercept + fit.rate * r.epsilon.ln()).exp()))
        .collect();
    Chart {
        title: format!("{} error, fitted rate {:.3}", fit.norm, fit.rate),
        x_label: "eps".into(),
        y_label: "error".into(),
        x_axis: Axis::Log10,
        y_axis: Axis::Log10,
        series: vec![
            Series::Points {
                label: fit.norm.to_string(),
                data,
            },
            Series::Line {
                label: format!("fit eps^{:.3}", fit.rate),
                data: line,
                dashed: false,
            },
        ],
    }
}

/// Fitted rate against `alpha` together with `min(1, (3 + alpha) / 4)`.
pub fn alpha_chart(rows: &[AlphaRow]) -> Chart {
    let fitted: Vec<(f64, f64)> = rows.iter().filter_map(|r| r.rate.map(|v| (r.alpha, v))).collect();
    let lo = rows.iter().map(|r| r.alpha).fold(f64::INFINITY, f64::min).min(0.0);
    let hi = rows.iter().map(|r| r.alpha).fold(f64::NEG_INFINITY, f64::max).max(1.5);
    let theory: Vec<(f64, f64)> = (0..=60)
        .map(|i| lo + (hi - lo) * i as f64 / 60.0)
        .map(|a| (a, alpha_rate(a)))
        .collect();
    Chart {
        title: "L2 rate against alpha".into(),
        x_label: "alpha".into(),
        y_label: "rate".into(),
        x_axis: Axis::Linear,
        y_axis: Axis::Linear,
        series: vec![
            Series::Points {
                label: "fitted".into(),
                data: fitted,
            },
            Series::Line {
                label: "min(1, (3 + alpha)/4)".into(),
                data: theory,
                dashed: true,
            },
        ],
    }
}
