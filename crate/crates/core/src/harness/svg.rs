//! Minimal deterministic SVG line plots.

use std::fmt::Write;

const PANEL_W: f64 = 420.0;
const PANEL_H: f64 = 320.0;
const MARGIN_L: f64 = 56.0;
const MARGIN_R: f64 = 16.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 46.0;
const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub markers: bool,
}

#[derive(Debug, Clone)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub x_range: Option<(f64, f64)>,
    pub y_range: Option<(f64, f64)>,
    pub series: Vec<Series>,
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn finite_points(p: &Panel) -> impl Iterator<Item = (f64, f64)> + '_ {
    p.series
        .iter()
        .flat_map(|s| s.points.iter().copied())
        .filter(move |(x, y)| x.is_finite() && y.is_finite() && (!p.log_x || *x > 0.0))
}

fn bounds(p: &Panel) -> ((f64, f64), (f64, f64)) {
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in finite_points(p) {
        let x = if p.log_x { x.log10() } else { x };
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let fix = |a: f64, b: f64| {
        if a.is_finite() && b > a {
            (a, b)
        } else if a.is_finite() {
            (a - 0.5, a + 0.5)
        } else {
            (0.0, 1.0)
        }
    };
    let xr = match p.x_range {
        Some((a, b)) if p.log_x => (a.log10(), b.log10()),
        Some(r) => r,
        None => fix(x0, x1),
    };
    (xr, p.y_range.unwrap_or_else(|| fix(y0.min(0.0), y1)))
}

fn ticks(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

fn panel(out: &mut String, p: &Panel, ox: f64) {
    let ((x0, x1), (y0, y1)) = bounds(p);
    let w = PANEL_W - MARGIN_L - MARGIN_R;
    let h = PANEL_H - MARGIN_T - MARGIN_B;
    let sx = |x: f64| ox + MARGIN_L + (if p.log_x { x.log10() } else { x } - x0) / (x1 - x0) * w;
    let sy = |y: f64| MARGIN_T + (1.0 - (y - y0) / (y1 - y0)) * h;
    let _ = writeln!(
        out,
        r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        ox + MARGIN_L,
        MARGIN_T,
        w,
        h
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="18" text-anchor="middle" font-size="13">{}</text>"#,
        ox + PANEL_W / 2.0,
        esc(&p.title)
    );
    let xt: Vec<f64> = if p.log_x {
        (x0.ceil() as i32..=x1.floor() as i32).map(|e| 10f64.powi(e)).collect()
    } else {
        ticks(x0, x1, 4)
    };
    for t in xt {
        let x = sx(t);
        let label = if p.log_x { format!("1e{}", t.log10().round() as i32) } else { format!("{t:.2}") };
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle" font-size="10">{label}</text>"#,
            MARGIN_T + h,
            MARGIN_T + h + 4.0,
            MARGIN_T + h + 15.0
        );
    }
    for t in ticks(y0, y1, 4) {
        let y = sy(t);
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end" font-size="10">{t:.2}</text>"#,
            ox + MARGIN_L - 4.0,
            ox + MARGIN_L,
            ox + MARGIN_L - 6.0,
            y + 3.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="11">{}</text>"#,
        ox + MARGIN_L + w / 2.0,
        PANEL_H - 10.0,
        esc(&p.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="12" y="{:.2}" text-anchor="middle" font-size="11" transform="rotate(-90 {:.2} {:.2})">{}</text>"#,
        MARGIN_T + h / 2.0,
        ox + 12.0,
        MARGIN_T + h / 2.0,
        esc(&p.y_label)
    );
    for (k, s) in p.series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite() && (!p.log_x || *x > 0.0))
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ =
            writeln!(out, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        if s.markers {
            for pt in &pts {
                let (x, y) = pt.split_once(',').unwrap();
                let _ = writeln!(out, r#"<circle cx="{x}" cy="{y}" r="2" fill="{color}"/>"#);
            }
        }
        let ly = MARGIN_T + 12.0 + 13.0 * k as f64;
        let lx = ox + PANEL_W - MARGIN_R - 130.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}" font-size="10">{}</text>"#,
            lx + 16.0,
            lx + 20.0,
            ly + 3.0,
            esc(&s.label)
        );
    }
}

/// Render panels side by side.
pub fn render(panels: &[Panel]) -> String {
    let width = PANEL_W * panels.len().max(1) as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{PANEL_H:.0}" viewBox="0 0 {width:.0} {PANEL_H:.0}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, p) in panels.iter().enumerate() {
        panel(&mut out, p, PANEL_W * i as f64);
    }
    out.push_str("</svg>\n");
    out
}
