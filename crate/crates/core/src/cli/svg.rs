//! Bare-bones SVG line plot of a [`Table`]: first column on x, every other
//! column as a polyline. Non-finite samples break the line.

use std::fmt::Write as _;

use super::table::Table;

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 4] = ["#1f4fbf", "#c0392b", "#2e8b57", "#8e44ad"];

fn range(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-300 {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

fn label(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.2e}")
    } else {
        format!("{:.3}", v)
            .trim_end_matches('0')
            .trim_end_matches('.')
            .to_string()
    }
}

pub fn render(t: &Table) -> String {
    let tx = |x: f64| if t.log_x { x.log10() } else { x };
    let (x0, x1) = range(t.rows.iter().map(|r| tx(r[0])));
    let (y0, y1) = range(t.rows.iter().flat_map(|r| r[1..].iter().copied()));
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let px = |x: f64| LEFT + (tx(x) - x0) / (x1 - x0) * pw;
    let py = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="18" font-size="13">{}</text>"#,
        LEFT,
        escape(&t.title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let xv = x0 + f * (x1 - x0);
        let xs = LEFT + f * pw;
        let shown = if t.log_x { 10f64.powf(xv) } else { xv };
        let _ = writeln!(
            s,
            r#"<line x1="{xs:.2}" y1="{}" x2="{xs:.2}" y2="{}" stroke="black"/>"#,
            TOP + ph,
            TOP + ph + 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{xs:.2}" y="{}" text-anchor="middle">{}</text>"#,
            TOP + ph + 18.0,
            label(shown)
        );
        let yv = y0 + f * (y1 - y0);
        let ys = TOP + (1.0 - f) * ph;
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{ys:.2}" x2="{LEFT}" y2="{ys:.2}" stroke="black"/>"#,
            LEFT - 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 8.0,
            ys + 4.0,
            label(yv)
        );
    }
    let xlabel = if t.log_x {
        format!("{} (log)", t.columns[0])
    } else {
        t.columns[0].clone()
    };
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        H - 12.0,
        escape(&xlabel)
    );

    for (c, name) in t.columns.iter().enumerate().skip(1) {
        let color = COLORS[(c - 1) % COLORS.len()];
        let mut d = String::new();
        let mut pen_up = true;
        for r in &t.rows {
            let (x, y) = (r[0], r[c]);
            if !(y.is_finite() && tx(x).is_finite()) {
                pen_up = true;
                continue;
            }
            let _ = write!(
                d,
                "{}{:.2},{:.2} ",
                if pen_up { "M" } else { "L" },
                px(x),
                py(y)
            );
            pen_up = false;
        }
        let _ = writeln!(
            s,
            r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            d.trim_end()
        );
        let ly = TOP + 14.0 * c as f64;
        let lx = LEFT + pw + 10.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 18.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}">{}</text>"#,
            lx + 22.0,
            ly + 4.0,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
