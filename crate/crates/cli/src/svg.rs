//! Hand-assembled SVG for the residual autocorrelation scatterplot.
//!
//! Output depends only on the series, so identical inputs give identical bytes.

use std::fmt::Write;

use sdw_core::json::format_float;
use sdw_core::ScatterSeries;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 0.05;

/// Linear map from a data interval onto a pixel interval.
struct Axis {
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Axis {
    /// Covers `values` and zero, so the axes through the origin are always visible.
    fn fit<'a>(values: impl Iterator<Item = &'a f64>, px_lo: f64, px_hi: f64) -> Self {
        let (mut lo, mut hi) = values.fold((0.0f64, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        if hi - lo <= f64::EPSILON * hi.abs().max(lo.abs()).max(1.0) {
            lo -= 1.0;
            hi += 1.0;
        }
        Axis {
            lo,
            hi,
            px_lo,
            px_hi,
        }
    }

    fn px(&self, v: f64) -> f64 {
        self.px_lo + (v - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo)
    }
}

fn coord(v: f64) -> String {
    let s = format!("{v:.2}");
    // avoid "-0.00"
    if s.trim_start_matches('-')
        .bytes()
        .all(|b| b == b'0' || b == b'.')
    {
        "0.00".to_owned()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

/// Points `(e_i, y_obs_i)` as radius-3 circles and a single trend line of slope
/// `I` through the origin, framed with 5% margins in an 800×600 view box.
pub fn render(labels: &[String], s: &ScatterSeries) -> String {
    let (x0, x1) = (MARGIN * WIDTH, (1.0 - MARGIN) * WIDTH);
    let (y0, y1) = (MARGIN * HEIGHT, (1.0 - MARGIN) * HEIGHT);
    let xa = Axis::fit(s.x.iter(), x0, x1);
    // screen y grows downward
    let ya = Axis::fit(s.y_observed.iter().chain(&s.y_trend), y1, y0);
    let slope = format_float(s.slope);

    let mut out = String::new();
    let w = &mut out;
    // Writing to a String cannot fail.
    let _ = writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        w,
        "<title>Residual autocorrelation scatterplot ({} mode): trend slope I = {slope}</title>",
        s.mode
    );
    let _ = writeln!(
        w,
        r##"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>"##
    );
    let _ = writeln!(
        w,
        r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#999999"/>"##,
        coord(x0),
        coord(y0),
        coord(x1 - x0),
        coord(y1 - y0)
    );
    let _ = writeln!(
        w,
        r##"<path d="M{} {}H{}M{} {}V{}" stroke="#666666" stroke-width="1" fill="none"/>"##,
        coord(x0),
        coord(ya.px(0.0)),
        coord(x1),
        coord(xa.px(0.0)),
        coord(y0),
        coord(y1)
    );

    let _ = writeln!(w, r##"<g fill="#1f77b4">"##);
    for (i, label) in labels.iter().enumerate() {
        let _ = writeln!(
            w,
            r#"<circle cx="{}" cy="{}" r="3"><title>{}</title></circle>"#,
            coord(xa.px(s.x[i])),
            coord(ya.px(s.y_observed[i])),
            escape(label)
        );
    }
    let _ = writeln!(w, "</g>");

    let _ = writeln!(
        w,
        r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#d62728" stroke-width="1.5"/>"##,
        coord(xa.px(xa.lo)),
        coord(ya.px(s.slope * xa.lo)),
        coord(xa.px(xa.hi)),
        coord(ya.px(s.slope * xa.hi))
    );
    let _ = writeln!(
        w,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="14">slope I = {slope}</text>"#,
        coord(x0 + 8.0),
        coord(y0 + 18.0)
    );
    let _ = writeln!(w, "</svg>");
    out
}
