//! SVG phase portraits and CSV orbit samples.

use std::fmt::Write;

use crate::centers::PiecewiseSystem;
use crate::verifier::{CycleReport, FastField, Half};

const WIDTH: f64 = 640.0;
const COLORS: [&str; 6] = ["#c0392b", "#2471a3", "#1e8449", "#7d3c98", "#b9770e", "#117a65"];

/// Bounding box of the cycles with a 10% margin, or `[-3, 3]^2`.
pub fn auto_window(cycles: &[&CycleReport]) -> [f64; 4] {
    let mut b = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
    for c in cycles {
        for tr in c.plus.iter().chain(c.minus.iter()) {
            for &(_, x, y) in &tr.samples {
                b = [b[0].min(x), b[1].max(x), b[2].min(y), b[3].max(y)];
            }
        }
    }
    if !b[0].is_finite() {
        return [-3.0, 3.0, -3.0, 3.0];
    }
    let mx = 0.1 * (b[1] - b[0]).max(1e-3);
    let my = 0.1 * (b[3] - b[2]).max(1e-3);
    [b[0] - mx, b[1] + mx, b[2] - my, b[3] + my]
}

struct Canvas {
    w: [f64; 4],
    height: f64,
}

impl Canvas {
    fn new(w: [f64; 4]) -> Self {
        let height = (WIDTH * (w[3] - w[2]) / (w[1] - w[0])).clamp(200.0, 1200.0);
        Self { w, height }
    }

    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        let u = (x - self.w[0]) / (self.w[1] - self.w[0]) * WIDTH;
        let v = self.height - (y - self.w[2]) / (self.w[3] - self.w[2]) * self.height;
        (u, v)
    }

    fn inside(&self, x: f64, y: f64) -> bool {
        x >= self.w[0] && x <= self.w[1] && y >= self.w[2] && y <= self.w[3]
    }

    fn polyline(&self, pts: &[(f64, f64)], stroke: &str, width: f64) -> String {
        let mut d = String::new();
        for &(x, y) in pts {
            let (u, v) = self.px(x, y);
            let _ = write!(d, "{u:.2},{v:.2} ");
        }
        format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"{width}\"/>\n",
            d.trim_end()
        )
    }
}

/// Short streamlines of the field on each side, seeded on a grid.
fn streamlines(pw: &PiecewiseSystem, c: &Canvas) -> Vec<Vec<(f64, f64)>> {
    let fields = [(FastField::new(&pw.plus.field()), 1.0), (FastField::new(&pw.minus.field()), -1.0)];
    let n = 14;
    let step = (c.w[1] - c.w[0]).max(c.w[3] - c.w[2]) / 400.0;
    let mut lines = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let x0 = c.w[0] + (i as f64 + 0.5) / n as f64 * (c.w[1] - c.w[0]);
            let y0 = c.w[2] + (j as f64 + 0.5) / n as f64 * (c.w[3] - c.w[2]);
            let Some((f, s)) = fields.iter().find(|(_, s)| s * x0 > 0.0) else {
                continue;
            };
            let dir = |z: [f64; 2]| {
                let v = f.eval(z);
                let n = v[0].hypot(v[1]);
                if n > 0.0 && n.is_finite() {
                    [v[0] / n, v[1] / n]
                } else {
                    [0.0, 0.0]
                }
            };
            let mut z = [x0, y0];
            let mut pts = vec![(x0, y0)];
            for _ in 0..24 {
                let k1 = dir(z);
                let k2 = dir([z[0] + 0.5 * step * k1[0], z[1] + 0.5 * step * k1[1]]);
                let k3 = dir([z[0] + 0.5 * step * k2[0], z[1] + 0.5 * step * k2[1]]);
                let k4 = dir([z[0] + step * k3[0], z[1] + step * k3[1]]);
                z = [
                    z[0] + step / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
                    z[1] + step / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
                ];
                if s * z[0] <= 0.0 || !c.inside(z[0], z[1]) {
                    break;
                }
                pts.push((z[0], z[1]));
            }
            if pts.len() > 1 {
                lines.push(pts);
            }
        }
    }
    lines
}

pub fn svg(pw: &PiecewiseSystem, cycles: &[&CycleReport], window: [f64; 4]) -> String {
    let c = Canvas::new(window);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{:.0}\" viewBox=\"0 0 {WIDTH} {:.2}\">",
        c.height, c.height
    );
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    out.push_str("<g id=\"streamlines\">\n");
    for line in streamlines(pw, &c) {
        out.push_str(&c.polyline(&line, "#bbbbbb", 0.8));
    }
    out.push_str("</g>\n");
    if window[0] <= 0.0 && window[1] >= 0.0 {
        let (u, _) = c.px(0.0, 0.0);
        let _ = writeln!(
            out,
            "<line id=\"sigma\" x1=\"{u:.2}\" y1=\"0\" x2=\"{u:.2}\" y2=\"{:.2}\" stroke=\"black\" stroke-width=\"1.5\"/>",
            c.height
        );
    }
    for (k, cyc) in cycles.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let _ = writeln!(out, "<g class=\"cycle\" id=\"cycle-{k}\">");
        for tr in cyc.plus.iter().chain(cyc.minus.iter()) {
            let pts: Vec<(f64, f64)> = tr.samples.iter().map(|&(_, x, y)| (x, y)).collect();
            out.push_str(&c.polyline(&pts, color, 1.8));
        }
        for y in [cyc.pair.y1, cyc.pair.y2] {
            let (u, v) = c.px(0.0, y);
            let _ = writeln!(out, "<circle cx=\"{u:.2}\" cy=\"{v:.2}\" r=\"3.5\" fill=\"{color}\"/>");
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

/// Columns `t,x,y,half,cycle_index`; the minus half continues the time of
/// the plus half.
pub fn csv(cycles: &[&CycleReport]) -> String {
    let mut out = String::from("t,x,y,half,cycle_index\n");
    for (k, cyc) in cycles.iter().enumerate() {
        let mut offset = 0.0;
        for tr in cyc.plus.iter().chain(cyc.minus.iter()) {
            let half = match tr.half {
                Half::Plus => "plus",
                Half::Minus => "minus",
            };
            for &(t, x, y) in &tr.samples {
                let _ = writeln!(out, "{},{x},{y},{half},{k}", t + offset);
            }
            offset += tr.period();
        }
    }
    out
}
