//! Minimal standalone SVG plots. Every series is also written as CSV inside
//! an XML comment so the numbers survive without a viewer.

use std::fmt::Write;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    Markers,
    Line,
    Dashed,
}

#[derive(Clone, Debug)]
pub struct Series {
    pub name: String,
    pub color: &'static str,
    pub style: Style,
    pub points: Vec<(f64, f64)>,
    /// Symmetric y error bars, one per point.
    pub errors: Option<Vec<f64>>,
}

impl Series {
    pub fn new(
        name: impl Into<String>,
        color: &'static str,
        style: Style,
        points: Vec<(f64, f64)>,
    ) -> Self {
        Self {
            name: name.into(),
            color,
            style,
            points,
            errors: None,
        }
    }

    pub fn with_errors(mut self, errors: Vec<f64>) -> Self {
        self.errors = Some(errors);
        self
    }
}

#[derive(Clone, Debug)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub series: Vec<Series>,
}

pub const BLUE: &str = "#1f5fbf";
pub const GREEN: &str = "#2e8b3d";
pub const RED: &str = "#c0392b";
pub const BLACK: &str = "#222222";
pub const GREY: &str = "#888888";

const MARGIN_LEFT: f64 = 56.0;
const MARGIN_RIGHT: f64 = 16.0;
const MARGIN_TOP: f64 = 28.0;
const MARGIN_BOTTOM: f64 = 40.0;

impl Plot {
    /// Axis limits padded around the data when `range` is degenerate.
    pub fn auto_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
        let (lo, hi) = values
            .filter(|v| v.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
                (a.min(v), b.max(v))
            });
        if !lo.is_finite() {
            return (0.0, 1.0);
        }
        if hi - lo < 1e-12 {
            return (lo - 0.5, hi + 0.5);
        }
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }

    fn render_into(&self, out: &mut String, x0: f64, y0: f64, width: f64, height: f64) {
        let pw = width - MARGIN_LEFT - MARGIN_RIGHT;
        let ph = height - MARGIN_TOP - MARGIN_BOTTOM;
        let (xa, xb) = self.x_range;
        let (ya, yb) = self.y_range;
        let sx = |x: f64| x0 + MARGIN_LEFT + (x - xa) / (xb - xa) * pw;
        let sy = |y: f64| y0 + MARGIN_TOP + (1.0 - (y - ya) / (yb - ya)) * ph;

        let _ = writeln!(
            out,
            r#"<rect x="{:.2}" y="{:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="{BLACK}"/>"#,
            x0 + MARGIN_LEFT,
            y0 + MARGIN_TOP
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="13">{}</text>"#,
            x0 + MARGIN_LEFT + pw / 2.0,
            y0 + 18.0,
            escape(&self.title)
        );
        for i in 0..=4 {
            let fx = xa + (xb - xa) * i as f64 / 4.0;
            let fy = ya + (yb - ya) * i as f64 / 4.0;
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="10">{}</text>"#,
                sx(fx),
                y0 + MARGIN_TOP + ph + 14.0,
                tick(fx)
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-size="10">{}</text>"#,
                x0 + MARGIN_LEFT - 4.0,
                sy(fy) + 3.0,
                tick(fy)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="11">{}</text>"#,
            x0 + MARGIN_LEFT + pw / 2.0,
            y0 + height - 8.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="11" transform="rotate(-90 {:.2} {:.2})">{}</text>"#,
            x0 + 14.0,
            y0 + MARGIN_TOP + ph / 2.0,
            x0 + 14.0,
            y0 + MARGIN_TOP + ph / 2.0,
            escape(&self.y_label)
        );

        for (idx, s) in self.series.iter().enumerate() {
            match s.style {
                Style::Line | Style::Dashed => {
                    let path: Vec<String> = s
                        .points
                        .iter()
                        .filter(|(x, y)| x.is_finite() && y.is_finite())
                        .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                        .collect();
                    let dash = if s.style == Style::Dashed {
                        r#" stroke-dasharray="5,4""#
                    } else {
                        ""
                    };
                    let _ = writeln!(
                        out,
                        r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"{dash}/>"#,
                        path.join(" "),
                        s.color
                    );
                }
                Style::Markers => {
                    for (i, &(x, y)) in s.points.iter().enumerate() {
                        if !(x.is_finite() && y.is_finite()) {
                            continue;
                        }
                        if let Some(err) = s.errors.as_ref().map(|e| e[i]).filter(|e| *e > 0.0) {
                            let _ = writeln!(
                                out,
                                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{}"/>"#,
                                sx(x),
                                sy(y - err),
                                sx(x),
                                sy(y + err),
                                s.color
                            );
                        }
                        let _ = writeln!(
                            out,
                            r#"<circle cx="{:.2}" cy="{:.2}" r="2.8" fill="none" stroke="{}"/>"#,
                            sx(x),
                            sy(y),
                            s.color
                        );
                    }
                }
            }
            let ly = y0 + MARGIN_TOP + 12.0 + 13.0 * idx as f64;
            let lx = x0 + MARGIN_LEFT + pw - 8.0;
            let _ = writeln!(
                out,
                r#"<text x="{lx:.2}" y="{ly:.2}" text-anchor="end" font-size="10" fill="{}">{}</text>"#,
                s.color,
                escape(&s.name)
            );
        }
    }

    fn data_comment(&self, out: &mut String) {
        let _ = writeln!(out, "<!-- data: {}", comment_safe(&self.title));
        let _ = writeln!(out, "series,x,y,error");
        for s in &self.series {
            for (i, (x, y)) in s.points.iter().enumerate() {
                let e = s
                    .errors
                    .as_ref()
                    .map_or(String::new(), |e| e[i].to_string());
                let _ = writeln!(out, "{},{x},{y},{e}", comment_safe(&s.name));
            }
        }
        let _ = writeln!(out, "-->");
    }
}

/// One or more plots laid out on a grid.
pub fn figure(plots: &[Plot], columns: usize, panel: (f64, f64)) -> String {
    let columns = columns.max(1);
    let rows = plots.len().div_ceil(columns).max(1);
    let (w, h) = (
        panel.0 * columns.min(plots.len().max(1)) as f64,
        panel.1 * rows as f64,
    );
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}" font-family="sans-serif">"#
    );
    for p in plots {
        p.data_comment(&mut out);
    }
    let _ = writeln!(
        out,
        r#"<rect width="{w:.0}" height="{h:.0}" fill="white"/>"#
    );
    for (i, p) in plots.iter().enumerate() {
        let (r, c) = (i / columns, i % columns);
        p.render_into(
            &mut out,
            c as f64 * panel.0,
            r as f64 * panel.1,
            panel.0,
            panel.1,
        );
    }
    out.push_str("</svg>\n");
    out
}

fn tick(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// XML comments may not contain `--`.
fn comment_safe(s: &str) -> String {
    s.replace("--", "- -")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Plot {
        Plot {
            title: "V & D".into(),
            x_label: "theta".into(),
            y_label: "value".into(),
            x_range: (0.0, 1.0),
            y_range: (0.0, 1.0),
            series: vec![
                Series::new("V", BLUE, Style::Markers, vec![(0.0, 1.0), (1.0, 0.5)])
                    .with_errors(vec![0.01, 0.02]),
                Series::new("bound", BLACK, Style::Line, vec![(0.0, 1.0), (1.0, 0.0)]),
            ],
        }
    }

    #[test]
    fn embeds_data_and_escapes_text() {
        let svg = figure(&[sample()], 1, (400.0, 300.0));
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("V,1,0.5,0.02"));
        assert!(svg.contains("V &amp; D"));
        assert_eq!(svg.matches("<circle").count(), 2);
    }

    #[test]
    fn rendering_is_deterministic() {
        let a = figure(&[sample(), sample()], 2, (300.0, 200.0));
        let b = figure(&[sample(), sample()], 2, (300.0, 200.0));
        assert_eq!(a, b);
    }

    #[test]
    fn auto_range_pads_and_handles_flat_data() {
        assert_eq!(Plot::auto_range([2.0, 2.0].into_iter()), (1.5, 2.5));
        let (lo, hi) = Plot::auto_range([0.0, 1.0].into_iter());
        assert!(lo < 0.0 && hi > 1.0);
    }
}
