//! Minimal SVG renderings of the report figures. Every function returns a
//! complete standalone document.

use std::fmt::Write;

use crate::segment::DensityEstimate;
use crate::seqclust::{leaf_order, Dendrogram};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 50.0;
const PALETTE: [&str; 8] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666"];

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

struct Canvas {
    body: String,
}

impl Canvas {
    fn new(title: &str) -> Self {
        let mut body = String::new();
        let _ = write!(
            body,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
        );
        body.push('\n');
        let _ = writeln!(body, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            body,
            r#"<text x="{:.2}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
            WIDTH / 2.0,
            esc(title)
        );
        Self { body }
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{stroke}"/>"#
        );
    }

    fn text(&mut self, x: f64, y: f64, anchor: &str, s: &str) {
        let _ = writeln!(self.body, r#"<text x="{x:.2}" y="{y:.2}" text-anchor="{anchor}">{}</text>"#, esc(s));
    }

    fn axes(&mut self, x_label: &str, y_label: &str) {
        let (x0, y0) = (MARGIN, HEIGHT - MARGIN);
        self.line(x0, y0, WIDTH - MARGIN / 2.0, y0, "black");
        self.line(x0, y0, x0, MARGIN, "black");
        self.text(WIDTH / 2.0, HEIGHT - 12.0, "middle", x_label);
        let _ = writeln!(
            self.body,
            r#"<text x="14" y="{:.2}" text-anchor="middle" transform="rotate(-90 14 {:.2})">{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            esc(y_label)
        );
    }

    fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}

/// Maps `[lo, hi]` onto `[a, b]`; a degenerate range maps to the midpoint.
fn scale(lo: f64, hi: f64, a: f64, b: f64) -> impl Fn(f64) -> f64 {
    move |v| {
        if hi > lo {
            a + (v - lo) / (hi - lo) * (b - a)
        } else {
            (a + b) / 2.0
        }
    }
}

fn y_ticks(c: &mut Canvas, lo: f64, hi: f64, sy: &dyn Fn(f64) -> f64) {
    for i in 0..=4 {
        let v = lo + (hi - lo) * f64::from(i) / 4.0;
        let y = sy(v);
        c.line(MARGIN - 4.0, y, MARGIN, y, "black");
        c.text(MARGIN - 6.0, y + 4.0, "end", &format!("{v:.3}"));
    }
}

/// Leaves along x in plot order, merge heights on y.
pub fn dendrogram(d: &Dendrogram, title: &str) -> String {
    let mut c = Canvas::new(title);
    c.axes("sequences", "height");
    let n = d.n_leaves;
    let order = leaf_order(d);
    let mut x = vec![0.0; n + d.merges.len()];
    let mut h = vec![0.0; n + d.merges.len()];
    let sx = scale(0.0, (n.max(2) - 1) as f64, MARGIN + 5.0, WIDTH - MARGIN);
    for (pos, &leaf) in order.iter().enumerate() {
        x[leaf] = sx(pos as f64);
    }
    let top = d.merges.iter().map(|m| m.height).fold(0.0, f64::max);
    let sy = scale(0.0, top.max(1e-12), HEIGHT - MARGIN, MARGIN);
    y_ticks(&mut c, 0.0, top, &sy);
    for (step, m) in d.merges.iter().enumerate() {
        let node = n + step;
        let (l, r) = (m.left, m.right);
        let y = sy(m.height);
        c.line(x[l], sy(h[l]), x[l], y, "#333");
        c.line(x[r], sy(h[r]), x[r], y, "#333");
        c.line(x[l], y, x[r], y, "#333");
        x[node] = (x[l] + x[r]) / 2.0;
        h[node] = m.height;
    }
    c.finish()
}

/// Points colored by group; `None` members are drawn hollow.
pub fn scatter(points: &[[f64; 2]], groups: &[Option<String>], title: &str) -> String {
    let mut c = Canvas::new(title);
    c.axes("PC1", "PC2");
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in points {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let sx = scale(lo[0], hi[0], MARGIN + 10.0, WIDTH - MARGIN);
    let sy = scale(lo[1], hi[1], HEIGHT - MARGIN - 10.0, MARGIN);
    let mut labels: Vec<&str> = groups.iter().flatten().map(String::as_str).collect();
    labels.sort_unstable();
    labels.dedup();
    for (p, g) in points.iter().zip(groups) {
        let (x, y) = (sx(p[0]), sy(p[1]));
        match g {
            Some(g) => {
                let color = PALETTE[labels.binary_search(&g.as_str()).unwrap_or(0) % PALETTE.len()];
                let _ = writeln!(c.body, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{color}"/>"#);
            }
            None => {
                let _ = writeln!(
                    c.body,
                    r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="none" stroke="black"/>"#
                );
            }
        }
    }
    for (i, l) in labels.iter().enumerate() {
        let y = MARGIN + 14.0 * i as f64;
        let _ = writeln!(
            c.body,
            r#"<rect x="{:.2}" y="{:.2}" width="10" height="10" fill="{}"/>"#,
            WIDTH - 80.0,
            y - 9.0,
            PALETTE[i % PALETTE.len()]
        );
        c.text(WIDTH - 64.0, y, "start", l);
    }
    c.finish()
}

/// SSE against k, with `mark` highlighted.
pub fn elbow(sse: &[(usize, f64)], mark: Option<usize>, title: &str) -> String {
    let mut c = Canvas::new(title);
    c.axes("k", "SSE");
    let k_lo = sse.iter().map(|s| s.0).min().unwrap_or(1) as f64;
    let k_hi = sse.iter().map(|s| s.0).max().unwrap_or(1) as f64;
    let top = sse.iter().map(|s| s.1).fold(0.0, f64::max);
    let sx = scale(k_lo, k_hi, MARGIN + 10.0, WIDTH - MARGIN);
    let sy = scale(0.0, top.max(1e-12), HEIGHT - MARGIN, MARGIN);
    y_ticks(&mut c, 0.0, top, &sy);
    let path: Vec<String> = sse.iter().map(|&(k, s)| format!("{:.2},{:.2}", sx(k as f64), sy(s))).collect();
    let _ = writeln!(c.body, r##"<polyline points="{}" fill="none" stroke="#1b9e77"/>"##, path.join(" "));
    for &(k, s) in sse {
        let fill = if Some(k) == mark { "#d95f02" } else { "#1b9e77" };
        let _ = writeln!(
            c.body,
            r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{fill}"/>"#,
            sx(k as f64),
            sy(s)
        );
        c.text(sx(k as f64), HEIGHT - MARGIN + 14.0, "middle", &k.to_string());
    }
    c.finish()
}

/// Density curve with vertical lines at the cut points.
pub fn density(d: &DensityEstimate, cuts: &[f64], title: &str) -> String {
    let mut c = Canvas::new(title);
    c.axes("sequence length", "density");
    let (lo, hi) = (d.grid.first().copied().unwrap_or(0.0), d.grid.last().copied().unwrap_or(1.0));
    let top = d.density.iter().copied().fold(0.0, f64::max);
    let sx = scale(lo, hi, MARGIN, WIDTH - MARGIN);
    let sy = scale(0.0, top.max(1e-300), HEIGHT - MARGIN, MARGIN);
    y_ticks(&mut c, 0.0, top, &sy);
    let path: Vec<String> = d
        .grid
        .iter()
        .zip(&d.density)
        .map(|(&x, &y)| format!("{:.2},{:.2}", sx(x), sy(y)))
        .collect();
    let _ = writeln!(c.body, r##"<polyline points="{}" fill="none" stroke="#7570b3"/>"##, path.join(" "));
    for &t in cuts {
        c.line(sx(t), HEIGHT - MARGIN, sx(t), MARGIN, "#d95f02");
        c.text(sx(t), MARGIN - 4.0, "middle", &format!("{t:.2}"));
    }
    c.finish()
}

fn quartiles(sorted: &[f64]) -> [f64; 5] {
    let q = |p: f64| crate::segment::quantile_sorted(sorted, p);
    [sorted[0], q(0.25), q(0.5), q(0.75), sorted[sorted.len() - 1]]
}

/// One box (min, quartiles, max) per named series; empty series are skipped.
pub fn boxplot(series: &[(String, Vec<f64>)], y_label: &str, title: &str) -> String {
    let mut c = Canvas::new(title);
    c.axes("", y_label);
    let top = series.iter().flat_map(|s| s.1.iter()).copied().fold(0.0, f64::max);
    let sy = scale(0.0, top.max(1e-12), HEIGHT - MARGIN, MARGIN);
    y_ticks(&mut c, 0.0, top, &sy);
    let slot = (WIDTH - 1.5 * MARGIN) / series.len().max(1) as f64;
    for (i, (name, values)) in series.iter().enumerate() {
        let cx = MARGIN + slot * (i as f64 + 0.5);
        c.text(cx, HEIGHT - MARGIN + 14.0, "middle", name);
        if values.is_empty() {
            continue;
        }
        let mut v = values.clone();
        v.sort_by(f64::total_cmp);
        let [min, q1, med, q3, max] = quartiles(&v);
        let w = slot * 0.3;
        c.line(cx, sy(min), cx, sy(q1), "black");
        c.line(cx, sy(q3), cx, sy(max), "black");
        let _ = writeln!(
            c.body,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}" stroke="black"/>"#,
            cx - w,
            sy(q3),
            2.0 * w,
            (sy(q1) - sy(q3)).max(0.5),
            PALETTE[i % PALETTE.len()]
        );
        c.line(cx - w, sy(med), cx + w, sy(med), "black");
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let _ = writeln!(c.body, r#"<circle cx="{cx:.2}" cy="{:.2}" r="3" fill="white" stroke="black"/>"#, sy(mean));
    }
    c.finish()
}
