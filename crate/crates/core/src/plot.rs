//! Minimal SVG line charts: axes, ticks and one polyline per series.

use std::fmt::Write as _;

use crate::error::{invalid_arg, Result};
use crate::sim::output::SeriesRow;
use crate::system::{GainQuery, RatingSystem};
use crate::{Rating, SkillCurve};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn bounds(it: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = it.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| {
        (l.min(v), h.max(v))
    });
    if hi - lo > 1e-12 * hi.abs().max(1.0) {
        (lo, hi)
    } else {
        let pad = 0.5 * lo.abs().max(1.0) * 0.1;
        (lo - pad, hi + pad)
    }
}

impl Chart {
    pub fn new(
        title: impl Into<String>,
        x_label: impl Into<String>,
        y_label: impl Into<String>,
    ) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            series: Vec::new(),
        }
    }

    pub fn with_series(mut self, label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        self.series.push(Series {
            label: label.into(),
            points,
        });
        self
    }

    /// Renders the chart. Fails if there is nothing finite to draw.
    pub fn to_svg(&self) -> Result<String> {
        let finite = || {
            self.series
                .iter()
                .flat_map(|s| s.points.iter())
                .filter(|(x, y)| x.is_finite() && y.is_finite())
        };
        if finite().next().is_none() {
            return Err(invalid_arg(format!(
                "chart '{}' has no finite points",
                self.title
            )));
        }
        let (x0, x1) = bounds(finite().map(|p| p.0));
        let (y0, y1) = bounds(finite().map(|p| p.1));
        let (pw, ph) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
        let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * ph;

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            out,
            r#"<path d="M{MARGIN},{MARGIN} V{b} H{r}" fill="none" stroke="black"/>"#,
            b = HEIGHT - MARGIN,
            r = WIDTH - MARGIN
        );
        for i in 0..=4 {
            let f = i as f64 / 4.0;
            let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
                sx(xv),
                HEIGHT - MARGIN + 16.0,
                tick(xv)
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
                MARGIN - 6.0,
                sy(yv) + 4.0,
                tick(yv)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            HEIGHT - 12.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(&self.y_label)
        );
        for (i, s) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let pts: Vec<String> = s
                .points
                .iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"><title>{}</title></polyline>"#,
                pts.join(" "),
                escape(&s.label)
            );
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" fill="{color}">{}</text>"#,
                WIDTH - MARGIN - 150.0,
                MARGIN + 14.0 * i as f64,
                escape(&s.label)
            );
        }
        out.push_str("</svg>\n");
        Ok(out)
    }
}

fn tick(v: f64) -> String {
    if v.abs() >= 1e4 || (v != 0.0 && v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{}", (v * 1000.0).round() / 1000.0)
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let n = n.max(2);
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

/// `σ(center + d, center)` for `d` across `[-half_width, half_width]`.
pub fn sigma_points(
    curve: &SkillCurve,
    center: Rating,
    half_width: f64,
    samples: usize,
) -> Result<Vec<(f64, f64)>> {
    linspace(-half_width, half_width, samples)
        .map(|d| Ok((d, curve.eval(center + d, center)?)))
        .collect()
}

/// Expected gain of a player rated `x` with true rating `x_star` against a
/// correctly rated opponent, as a function of the opponent's rating.
pub fn gain_points(
    sys: &RatingSystem,
    x: Rating,
    x_star: Rating,
    (lo, hi): (Rating, Rating),
    samples: usize,
) -> Result<Vec<(f64, f64)>> {
    linspace(lo, hi, samples)
        .map(|y| {
            Ok((
                y,
                sys.expected_gain(&GainQuery::against_correct(x, x_star, y))?,
            ))
        })
        .collect()
}

pub fn sigma_chart(
    curves: &[(&str, &SkillCurve)],
    center: Rating,
    half_width: f64,
    samples: usize,
) -> Result<Chart> {
    let mut chart = Chart::new("Skill curve", "rating difference x - y", "sigma(x, y)");
    for (label, curve) in curves {
        chart = chart.with_series(*label, sigma_points(curve, center, half_width, samples)?);
    }
    Ok(chart)
}

pub fn gain_chart(
    sys: &RatingSystem,
    x: Rating,
    x_star: Rating,
    range: (Rating, Rating),
    samples: usize,
) -> Result<Chart> {
    Ok(Chart::new(
        format!("Expected gain at x = {x}, x* = {x_star}"),
        "opponent rating y",
        "expected gain",
    )
    .with_series(sys.label(), gain_points(sys, x, x_star, range, samples)?))
}

pub fn trajectory_chart(rows: &[SeriesRow]) -> Result<Chart> {
    if rows.is_empty() {
        return Err(invalid_arg("rating series is empty"));
    }
    let pick = |f: fn(&SeriesRow) -> f64| rows.iter().map(|r| (r.round as f64, f(r))).collect();
    Ok(Chart::new("Attacker rating", "round", "rating")
        .with_series("current", pick(|r| r.attacker_current))
        .with_series("true", pick(|r| r.attacker_true))
        .with_series("pool mean", pick(|r| r.pool_mean)))
}
