//! Distance-versus-step line charts as standalone SVG.

use std::fmt::Write;

use omega_core::Trajectory;

/// Floor applied to non-positive distances on a logarithmic axis.
pub const LOG_FLOOR: f64 = 1e-16;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PlotOptions {
    pub log_y: bool,
    pub title: Option<String>,
    /// Trailing moving-average window; 1 disables smoothing.
    pub smooth: usize,
}

pub struct Series<'a> {
    pub label: String,
    pub trajectory: &'a Trajectory,
}

/// The SVG text plus warnings about values that could not be drawn as-is.
#[derive(Clone, Debug, PartialEq)]
pub struct Plot {
    pub svg: String,
    pub warnings: Vec<String>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn smooth(values: &[f64], window: usize) -> Vec<f64> {
    if window <= 1 {
        return values.to_vec();
    }
    (0..values.len())
        .map(|i| {
            let lo = (i + 1).saturating_sub(window);
            let slice = &values[lo..=i];
            slice.iter().sum::<f64>() / slice.len() as f64
        })
        .collect()
}

/// Round tick values covering `[lo, hi]`, about five of them.
fn linear_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let magnitude = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * magnitude)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * magnitude);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e5 || v.abs() < 1e-3 {
        format!("{v:.0e}")
    } else {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

pub fn render(series: &[Series], options: &PlotOptions) -> Plot {
    let mut warnings = Vec::new();
    let mut lines: Vec<Vec<(f64, f64)>> = Vec::with_capacity(series.len());
    for s in series {
        let steps: Vec<f64> = s.trajectory.records.iter().map(|r| r.step as f64).collect();
        let distances: Vec<f64> = s.trajectory.records.iter().map(|r| r.distance).collect();
        let mut points = Vec::with_capacity(steps.len());
        let (mut clamped, mut dropped) = (0, 0);
        for (x, y) in steps.into_iter().zip(smooth(&distances, options.smooth)) {
            if !y.is_finite() {
                dropped += 1;
                continue;
            }
            let y = if options.log_y {
                if y < LOG_FLOOR {
                    clamped += 1;
                }
                y.max(LOG_FLOOR).log10()
            } else {
                y
            };
            points.push((x, y));
        }
        if clamped > 0 {
            warnings.push(format!(
                "{}: {clamped} distance(s) below {LOG_FLOOR:e} clamped for the log axis",
                s.label
            ));
        }
        if dropped > 0 {
            warnings.push(format!("{}: {dropped} non-finite distance(s) omitted", s.label));
        }
        lines.push(points);
    }

    let all = lines.iter().flatten();
    let (mut x_lo, mut x_hi, mut y_lo, mut y_hi) = all.fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), &(x, y)| (a.min(x), b.max(x), c.min(y), d.max(y)),
    );
    if !x_lo.is_finite() {
        (x_lo, x_hi, y_lo, y_hi) = (0.0, 1.0, 0.0, 1.0);
    }
    if x_hi == x_lo {
        x_hi = x_lo + 1.0;
    }
    if options.log_y {
        y_lo = y_lo.floor();
        y_hi = y_hi.ceil();
    }
    if y_hi == y_lo {
        y_lo -= 0.5;
        y_hi += 0.5;
    }
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let py = |y: f64| TOP + (y_hi - y) / (y_hi - y_lo) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    if let Some(title) = &options.title {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            LEFT + plot_w / 2.0,
            escape(title)
        );
    }

    let _ = writeln!(svg, r##"<g stroke="#dddddd" stroke-width="1">"##);
    let x_ticks = linear_ticks(x_lo, x_hi);
    let y_ticks: Vec<f64> = if options.log_y {
        (y_lo as i64..=y_hi as i64).map(|e| e as f64).collect()
    } else {
        linear_ticks(y_lo, y_hi)
    };
    for &t in &x_ticks {
        let _ = writeln!(
            svg,
            r#"<line x1="{0:.2}" y1="{TOP}" x2="{0:.2}" y2="{1:.2}"/>"#,
            px(t),
            TOP + plot_h
        );
    }
    for &t in &y_ticks {
        let _ = writeln!(
            svg,
            r#"<line x1="{LEFT}" y1="{0:.2}" x2="{1:.2}" y2="{0:.2}"/>"#,
            py(t),
            LEFT + plot_w
        );
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for &t in &x_ticks {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            px(t),
            TOP + plot_h + 18.0,
            tick_label(t)
        );
    }
    for &t in &y_ticks {
        let label = if options.log_y {
            format!("1e{}", t as i64)
        } else {
            tick_label(t)
        };
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#,
            LEFT - 8.0,
            py(t) + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">step</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{0:.2}" text-anchor="middle" transform="rotate(-90 20 {0:.2})">distance to optimum</text>"#,
        TOP + plot_h / 2.0
    );

    for (i, points) in lines.iter().enumerate() {
        let coords: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            PALETTE[i % PALETTE.len()],
            coords.join(" ")
        );
    }

    let legend_x = LEFT + plot_w + 15.0;
    for (i, s) in series.iter().enumerate() {
        let y = TOP + 10.0 + 20.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{legend_x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{}" stroke-width="3"/>"#,
            legend_x + 20.0,
            PALETTE[i % PALETTE.len()]
        );
        let _ = writeln!(
            svg,
            r#"<text class="legend" x="{:.2}" y="{:.2}">{}</text>"#,
            legend_x + 26.0,
            y + 4.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    Plot { svg, warnings }
}

#[cfg(test)]
mod tests {
    use super::*;
    use omega_core::harness::Record;

    fn trajectory(d: &[f64]) -> Trajectory {
        let records = d
            .iter()
            .enumerate()
            .map(|(i, &distance)| Record {
                step: i * 10,
                distance,
                payoff: 0.0,
            })
            .collect();
        Trajectory::from_records(records, String::new(), false).unwrap()
    }

    #[test]
    fn ticks_are_round() {
        assert_eq!(linear_ticks(0.0, 1000.0), vec![0.0, 200.0, 400.0, 600.0, 800.0, 1000.0]);
        let unit = linear_ticks(0.0, 1.0);
        assert_eq!(unit.len(), 6);
        assert_eq!(tick_label(unit[3]), "0.6");
    }

    #[test]
    fn smoothing_is_a_trailing_mean() {
        assert_eq!(smooth(&[1.0, 3.0, 5.0], 2), vec![1.0, 2.0, 4.0]);
        assert_eq!(smooth(&[1.0, 3.0], 1), vec![1.0, 3.0]);
    }

    #[test]
    fn labels_are_escaped() {
        let t = trajectory(&[1.0, 2.0]);
        let plot = render(
            &[Series {
                label: "a<b&c".into(),
                trajectory: &t,
            }],
            &PlotOptions::default(),
        );
        assert!(plot.svg.contains("a&lt;b&amp;c"));
    }

    #[test]
    fn non_finite_points_are_dropped() {
        let t = trajectory(&[1.0, f64::INFINITY]);
        let plot = render(
            &[Series {
                label: "s".into(),
                trajectory: &t,
            }],
            &PlotOptions::default(),
        );
        assert_eq!(plot.warnings.len(), 1);
    }
}
