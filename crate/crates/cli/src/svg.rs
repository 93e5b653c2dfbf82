//! Static SVG step plots of a CIF set: one polyline per cause, axes in data
//! units and a legend.

use std::fmt::Write;

use ordcif::CifSet;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 140.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const COLOURS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];
const DASHES: [&str; 4] = ["", "6,3", "2,3", "8,3,2,3"];

/// Rounds `x` up to a round multiple of a power of ten.
fn nice_ceiling(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let p = 10f64.powf(x.log10().floor());
    [1.0, 1.2, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0].iter().map(|m| m * p).find(|&v| v >= x).unwrap_or(10.0 * p)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn plot_cifs(set: &CifSet, title: &str) -> String {
    let grid = set.grid();
    let x_max = nice_ceiling(grid.last().copied().unwrap_or(1.0) * 1.02);
    let top_value = set.cifs().iter().map(|f| f.terminal()).fold(0.0, f64::max);
    let y_max = nice_ceiling(top_value.max(0.05));
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |t: f64| LEFT + t / x_max * pw;
    let sy = |v: f64| TOP + ph - v / y_max * ph;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, LEFT + pw / 2.0, escape(title));
    // axes and ticks
    let _ = writeln!(
        out,
        r#"<path d="M{LEFT},{TOP} V{} H{}" fill="none" stroke="black"/>"#,
        TOP + ph,
        LEFT + pw
    );
    for m in 0..=5 {
        let t = x_max * m as f64 / 5.0;
        let x = sx(t);
        let _ = writeln!(out, r#"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="black"/>"#, TOP + ph, TOP + ph + 5.0);
        let _ = writeln!(out, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#, TOP + ph + 18.0, tick_label(t));
        let v = y_max * m as f64 / 5.0;
        let y = sy(v);
        let _ = writeln!(out, r#"<line x1="{}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/>"#, LEFT - 5.0);
        let _ = writeln!(out, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 8.0, y + 4.0, tick_label(v));
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">time</text>"#, LEFT + pw / 2.0, HEIGHT - 10.0);
    let _ = writeln!(
        out,
        r#"<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">cumulative incidence</text>"#,
        TOP + ph / 2.0
    );
    // one step trace per cause
    for (j, f) in set.cifs().iter().enumerate() {
        let mut pts = vec![(0.0, f.initial())];
        let mut prev = f.initial();
        for (&t, &v) in f.knots().iter().zip(f.values()) {
            pts.push((t, prev));
            pts.push((t, v));
            prev = v;
        }
        pts.push((x_max, prev));
        let points: Vec<String> = pts.iter().map(|&(t, v)| format!("{:.2},{:.2}", sx(t), sy(v))).collect();
        let colour = COLOURS[j % COLOURS.len()];
        let dash = DASHES[j % DASHES.len()];
        let dash_attr = if dash.is_empty() { String::new() } else { format!(r#" stroke-dasharray="{dash}""#) };
        let _ = writeln!(
            out,
            r#"<polyline class="cif" data-cause="{}" fill="none" stroke="{colour}" stroke-width="1.5"{dash_attr} points="{}"/>"#,
            j + 1,
            points.join(" ")
        );
        let ly = TOP + 10.0 + 18.0 * j as f64;
        let lx = LEFT + pw + 15.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{colour}" stroke-width="1.5"{dash_attr}/>"#,
            lx + 25.0
        );
        let _ = writeln!(out, r#"<text x="{}" y="{}">Cause {}</text>"#, lx + 30.0, ly + 4.0, j + 1);
    }
    out.push_str("</svg>\n");
    out
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() { "0".into() } else { s.to_string() }
}
