//! Minimal static line charts: success rate against `m` for support sweeps and
//! adversary audits, median angular error against `m2` for approximate sweeps.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::config::Mode;
use super::summary::GridSummary;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
}

fn collect_series(rows: &[GridSummary]) -> (Vec<Series>, &'static str, &'static str) {
    let approx = rows.first().is_some_and(|r| r.mode == Mode::ApproxSweep);
    let mut groups: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for r in rows {
        let point = if approx {
            match (r.m2, r.median_error) {
                (Some(m2), Some(e)) => Some((m2 as f64, e)),
                _ => None,
            }
        } else {
            r.m.map(|m| (m as f64, r.success_rate))
        };
        let Some(point) = point else { continue };
        let label = if approx {
            format!("n={} k={} eps={}", r.n, r.k, r.epsilon.unwrap_or_default())
        } else {
            format!("n={} k={}", r.n, r.k)
        };
        groups.entry(label).or_default().push(point);
    }
    let series = groups
        .into_iter()
        .map(|(label, mut points)| {
            points.sort_by(|a, b| a.0.total_cmp(&b.0));
            Series { label, points }
        })
        .collect();
    if approx {
        (series, "m2 (log2)", "median angular error")
    } else {
        (series, "m", "success rate")
    }
}

/// Renders an SVG document. Approximate sweeps use a log2 x axis.
pub fn render_svg(rows: &[GridSummary]) -> String {
    let (series, x_label, y_label) = collect_series(rows);
    let log_x = rows.first().is_some_and(|r| r.mode == Mode::ApproxSweep);
    let tx = |x: f64| if log_x { x.log2() } else { x };
    let xs: Vec<f64> = series.iter().flat_map(|s| s.points.iter().map(|p| tx(p.0))).collect();
    let ys: Vec<f64> = series.iter().flat_map(|s| s.points.iter().map(|p| p.1)).collect();
    let (x_min, x_max) = bounds(&xs);
    let y_max = if log_x { bounds(&ys).1.max(1e-9) } else { 1.0 };
    let px = |x: f64| MARGIN + (tx(x) - x_min) / (x_max - x_min) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - y / y_max * (HEIGHT - 2.0 * MARGIN);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        out,
        r#"<path d="M{left} {top} L{left} {bottom} L{right} {bottom}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{x_label}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 20.0
    );
    let _ = writeln!(
        out,
        r#"<text x="15" y="{}" text-anchor="middle" transform="rotate(-90 15 {})">{y_label}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{bottom}" text-anchor="end">0</text>"#,
        left - 5.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{top}" text-anchor="end">{y_max:.3}</text>"#,
        left - 5.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{left}" y="{}" text-anchor="middle">{x_min}</text>"#,
        bottom + 30.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{right}" y="{}" text-anchor="middle">{x_max}</text>"#,
        bottom + 30.0
    );

    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = s
            .points
            .iter()
            .enumerate()
            .map(|(j, &(x, y))| format!("{}{:.2} {:.2}", if j == 0 { "M" } else { "L" }, px(x), py(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<path d="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            path.join(" ")
        );
        for &(x, y) in &s.points {
            let _ = writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                px(x),
                py(y)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" fill="{color}">{}</text>"#,
            right - 120.0,
            top + 15.0 * (i as f64 + 1.0),
            s.label
        );
    }
    out.push_str("</svg>\n");
    out
}

fn bounds(values: &[f64]) -> (f64, f64) {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi > lo {
        (lo, hi)
    } else {
        (lo - 1.0, hi + 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_one_path_per_series() {
        let row = |m: usize, rate: f64| GridSummary {
            mode: Mode::SupportSweep,
            grid_index: 0,
            n: 20,
            k: 2,
            m: Some(m),
            d: Some(10),
            epsilon: None,
            m2: None,
            trials: 10,
            successes: 0,
            success_rate: rate,
            median_error: None,
            p95_error: None,
        };
        let svg = render_svg(&[row(40, 0.5), row(80, 1.0)]);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<circle").count(), 2);
        assert!(svg.contains("n=20 k=2"));
        assert!(render_svg(&[]).contains("</svg>"));
    }
}
