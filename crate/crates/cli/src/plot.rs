//! Static SVG line plots with a logarithmic y axis.

use std::fmt::Write;

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 250.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
    /// Draw markers only.
    pub markers: bool,
}

#[derive(Debug, Clone)]
pub struct Axes {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders the series; points with `y <= 0` are not drawable on a log axis
/// and break the line.
pub fn render(axes: &Axes, series: &[Series]) -> String {
    let xs = |x: f64| if axes.log_x { x.log10() } else { x };
    let drawable = |&(x, y): &(f64, f64)| y > 0.0 && y.is_finite() && x.is_finite() && (!axes.log_x || x > 0.0);
    let pts = || series.iter().flat_map(|s| s.points.iter().copied()).filter(|p| drawable(p));
    let (mut x0, mut x1) = pts().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (x, _)| (a.min(xs(x)), b.max(xs(x))));
    let (lo, hi) = pts().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (_, y)| (a.min(y), b.max(y)));
    if !x0.is_finite() {
        (x0, x1) = (0.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    let (d0, mut d1) = if lo.is_finite() { (lo.log10().floor(), hi.log10().ceil()) } else { (-3.0, 0.0) };
    if d1 <= d0 {
        d1 = d0 + 1.0;
    }
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (xs(x) - x0) / (x1 - x0) * pw;
    let py = |y: f64| TOP + (d1 - y.log10()) / (d1 - d0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, LEFT + pw / 2.0, escape(&axes.title));

    // decades and minor ticks
    let mut d = d0;
    while d <= d1 + 0.5 {
        let y = TOP + (d1 - d) / (d1 - d0) * ph;
        let _ = writeln!(s, r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ccc"/>"##, LEFT + pw);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">1e{}</text>"#, LEFT - 6.0, y + 4.0, d as i64);
        if d < d1 {
            for k in 2..10 {
                let ym = py(10f64.powf(d) * k as f64);
                let _ = writeln!(s, r##"<line x1="{LEFT}" y1="{ym:.2}" x2="{:.2}" y2="{ym:.2}" stroke="#eee"/>"##, LEFT + pw);
            }
        }
        d += 1.0;
    }
    for i in 0..=6 {
        let v = x0 + (x1 - x0) * i as f64 / 6.0;
        let x = LEFT + pw * i as f64 / 6.0;
        let label = if axes.log_x { format!("{:.3}", 10f64.powf(v)) } else { format!("{v:.4}").trim_end_matches('0').trim_end_matches('.').to_owned() };
        let _ = writeln!(s, r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#eee"/>"##, TOP + ph);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#, TOP + ph + 16.0);
    }
    let _ = writeln!(s, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, LEFT + pw / 2.0, HEIGHT - 12.0, escape(&axes.x_label));
    let _ = writeln!(
        s,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        TOP + ph / 2.0,
        escape(&axes.y_label)
    );

    for (i, ser) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let dash = if ser.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        if ser.markers {
            for p in ser.points.iter().filter(|p| drawable(p)) {
                let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="none" stroke="{color}"/>"#, px(p.0), py(p.1));
            }
        } else {
            let mut run: Vec<String> = Vec::new();
            let flush = |run: &mut Vec<String>, s: &mut String| {
                if run.len() > 1 {
                    let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.6"{dash} points="{}"/>"#, run.join(" "));
                }
                run.clear();
            };
            for p in &ser.points {
                if drawable(p) {
                    run.push(format!("{:.2},{:.2}", px(p.0), py(p.1)));
                } else {
                    flush(&mut run, &mut s);
                }
            }
            flush(&mut run, &mut s);
        }
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = WIDTH - RIGHT + 12.0;
        if ser.markers {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{ly:.2}" r="3" fill="none" stroke="{color}"/>"#, lx + 11.0);
        } else {
            let _ = writeln!(s, r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="1.6"{dash}/>"#, lx + 22.0);
        }
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, lx + 28.0, ly + 4.0, escape(&ser.label));
    }
    s.push_str("</svg>\n");
    s
}
