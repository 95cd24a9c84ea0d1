//! Minimal static SVG line charts.

use std::fmt::Write as _;

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone) -> Self {
        let (x0, x1) = bounds(xs);
        let (y0, y1) = bounds(ys);
        Self { x0, x1, y0, y1 }
    }

    fn x(&self, v: f64) -> f64 {
        LEFT + (v - self.x0) / (self.x1 - self.x0) * (W - LEFT - RIGHT)
    }

    fn y(&self, v: f64) -> f64 {
        H - BOTTOM - (v - self.y0) / (self.y1 - self.y0) * (H - TOP - BOTTOM)
    }
}

fn bounds(vs: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vs
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn open(out: &mut String, title: &str) {
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
        W / 2.0,
        escape(title)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn axes(out: &mut String, f: &Frame, x_label: &str, y_label: &str) {
    let (bx, by) = (LEFT, H - BOTTOM);
    let _ = writeln!(
        out,
        "<path d=\"M{bx} {TOP} V{by} H{}\" stroke=\"black\" fill=\"none\"/>",
        W - RIGHT
    );
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let xv = f.x0 + t * (f.x1 - f.x0);
        let yv = f.y0 + t * (f.y1 - f.y0);
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{:.1}</text>",
            f.x(xv),
            by + 16.0,
            xv
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{:.3e}</text>",
            bx - 6.0,
            f.y(yv) + 4.0,
            yv
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>",
        LEFT + (W - LEFT - RIGHT) / 2.0,
        H - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        "<text x=\"14\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 {:.2})\">{}</text>",
        H / 2.0,
        H / 2.0,
        escape(y_label)
    );
}

fn polyline(out: &mut String, f: &Frame, pts: &[(f64, f64)], color: &str) {
    let coords: Vec<String> = pts
        .iter()
        .filter(|(_, y)| y.is_finite())
        .map(|&(x, y)| format!("{:.2},{:.2}", f.x(x), f.y(y)))
        .collect();
    let _ = writeln!(
        out,
        "<polyline points=\"{}\" stroke=\"{color}\" stroke-width=\"1.5\" fill=\"none\"/>",
        coords.join(" ")
    );
}

/// Penalized error against k; the minimum is marked.
pub fn curve_svg(title: &str, ks: &[usize], values: &[f64]) -> String {
    let pts: Vec<(f64, f64)> = ks.iter().map(|&k| k as f64).zip(values.iter().copied()).collect();
    let f = Frame::new(pts.iter().map(|p| p.0), pts.iter().map(|p| p.1));
    let mut out = String::new();
    open(&mut out, title);
    axes(&mut out, &f, "k", "penalized error");
    polyline(&mut out, &f, &pts, "steelblue");
    let best = pts
        .iter()
        .filter(|p| p.1.is_finite())
        .min_by(|a, b| a.1.total_cmp(&b.1));
    for &(x, y) in &pts {
        let fill = if Some(&(x, y)) == best { "crimson" } else { "steelblue" };
        let _ = writeln!(
            out,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{fill}\"/>",
            f.x(x),
            f.y(y)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Estimated against assumed K, with the diagonal where they agree.
pub fn staircase_svg(pairs: &[(usize, usize)]) -> String {
    let all = pairs.iter().flat_map(|&(a, e)| [a as f64, e as f64]);
    let f = Frame::new(all.clone(), all);
    let mut out = String::new();
    open(&mut out, "assumed vs estimated number of clusters");
    axes(&mut out, &f, "assumed K", "estimated k");
    let diag = [(f.x0, f.x0), (f.x1, f.x1)];
    let _ = writeln!(
        out,
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>",
        f.x(diag[0].0),
        f.y(diag[0].1),
        f.x(diag[1].0),
        f.y(diag[1].1)
    );
    let pts: Vec<(f64, f64)> = pairs.iter().map(|&(a, e)| (a as f64, e as f64)).collect();
    polyline(&mut out, &f, &pts, "steelblue");
    for &(a, e) in pairs {
        let fill = if a == e { "crimson" } else { "steelblue" };
        let _ = writeln!(
            out,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3.5\" fill=\"{fill}\"/>",
            f.x(a as f64),
            f.y(e as f64)
        );
    }
    out.push_str("</svg>\n");
    out
}
