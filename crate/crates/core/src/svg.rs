//! Minimal standalone SVG line charts.

use std::fmt::Write as _;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 60.0;
const BOTTOM: f64 = 80.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

/// Formats with six significant digits, dropping trailing zeros (like `%g`).
pub fn fmt_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..6).contains(&exp) {
        let s = format!("{x:.5e}");
        let (mantissa, e) = s.split_once('e').expect("exponent form");
        return format!("{}e{e}", trim_zeros(mantissa));
    }
    let decimals = (5 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}"))
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        let pad = if lo == 0.0 { 1.0 } else { 0.5 * lo.abs() };
        (lo - pad, hi + pad)
    } else {
        (lo, hi)
    }
}

/// Renders one polyline per series on shared linear axes.
pub fn line_chart(series: &[Series], title: &str, x_label: &str, y_label: &str) -> String {
    let (x_min, x_max) = padded_range(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (y_min, y_max) = padded_range(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x_min) / (x_max - x_min) * plot_w;
    let sy = |y: f64| TOP + plot_h - (y - y_min) / (y_max - y_min) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="800" height="600" viewBox="0 0 800 600" font-family="sans-serif">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="800" height="600" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="30" font-size="20" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(title)
    );

    // axes
    let x0 = LEFT;
    let x1 = LEFT + plot_w;
    let y0 = TOP + plot_h;
    let _ = writeln!(s, r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}" stroke="black"/>"#);
    let _ = writeln!(s, r#"<line x1="{x0:.2}" y1="{TOP:.2}" x2="{x0:.2}" y2="{y0:.2}" stroke="black"/>"#);

    for (value, px) in [(x_min, x0), (x_max, x1)] {
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{y0:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#,
            y0 + 6.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{px:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
            y0 + 22.0,
            fmt_sig6(value)
        );
    }
    for (value, py) in [(y_min, y0), (y_max, TOP)] {
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{x0:.2}" y2="{py:.2}" stroke="black"/>"#,
            x0 - 6.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end">{}</text>"#,
            x0 - 10.0,
            py + 4.0,
            fmt_sig6(value)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="14" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 25.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="25" y="{:.2}" font-size="14" text-anchor="middle" transform="rotate(-90 25 {:.2})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(y_label)
    );

    for (i, series) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = series.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            pts.join(" ")
        );
        for &(x, y) in &series.points {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, sx(x), sy(y));
        }
        let ly = TOP + 10.0 + 22.0 * i as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            lx + 25.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="12">{}</text>"#,
            lx + 32.0,
            ly + 4.0,
            escape(&series.name)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig6_formatting() {
        assert_eq!(fmt_sig6(0.5), "0.5");
        assert_eq!(fmt_sig6(-0.123456789), "-0.123457");
        assert_eq!(fmt_sig6(1234.5678), "1234.57");
        assert_eq!(fmt_sig6(0.0), "0");
        assert_eq!(fmt_sig6(1.5e-9), "1.5e-9");
        assert_eq!(fmt_sig6(30.0), "30");
    }

    #[test]
    fn chart_structure() {
        let series = vec![
            Series { name: "zf".into(), points: vec![(0.0, 1.0), (10.0, 2.0)] },
            Series { name: "a<b".into(), points: vec![(0.0, 1.5), (10.0, 3.0)] },
        ];
        let svg = line_chart(&series, "Rates", "snr_db", "avg_rate_min");
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("a&lt;b"));
        assert!(svg.contains(r#"viewBox="0 0 800 600""#));
    }

    #[test]
    fn single_point_series() {
        let series = vec![Series { name: "mmse".into(), points: vec![(5.0, 5.0)] }];
        let svg = line_chart(&series, "", "x", "y");
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(!svg.contains("NaN"));
    }
}
