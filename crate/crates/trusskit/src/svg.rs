//! SVG rendering of trusses.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::truss::Truss;

/// Per-edge values are indexed by edge id; flex vectors hold `2v` displacement entries.
#[derive(Clone, Debug, PartialEq)]
pub enum Coloring {
    None,
    Sigma(Vec<f64>),
    Elongation(Vec<f64>),
    Flex(Vec<f64>),
}

const SCALE: f64 = 60.0;
const MARGIN: f64 = 30.0;

/// Diverging blue / grey / red scale on `[-1, 1]`.
fn diverging(s: f64) -> String {
    let s = s.clamp(-1.0, 1.0);
    let grey = 190.0;
    let (r, g, b) = if s >= 0.0 {
        (grey + (200.0 - grey) * s, grey * (1.0 - s) + 30.0 * s, grey * (1.0 - s) + 30.0 * s)
    } else {
        let u = -s;
        (grey * (1.0 - u) + 30.0 * u, grey * (1.0 - u) + 80.0 * u, grey + (210.0 - grey) * u)
    };
    format!("#{:02x}{:02x}{:02x}", r.round() as u8, g.round() as u8, b.round() as u8)
}

pub fn render_svg(t: &Truss<f64>, coloring: &Coloring) -> Result<String> {
    let edge_values = match coloring {
        Coloring::Sigma(v) | Coloring::Elongation(v) => {
            if v.len() != t.num_edges() {
                return Err(Error::LengthMismatch { expected: t.num_edges(), got: v.len() });
            }
            Some(v.as_slice())
        }
        Coloring::Flex(u) => {
            if u.len() != 2 * t.num_vertices() {
                return Err(Error::LengthMismatch { expected: 2 * t.num_vertices(), got: u.len() });
            }
            None
        }
        Coloring::None => None,
    };
    let pts = t.vertices();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in pts {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    if pts.is_empty() {
        (x0, x1, y0, y1) = (0.0, 0.0, 0.0, 0.0);
    }
    let legend_h = if edge_values.is_some() { 40.0 } else { 0.0 };
    let w = (x1 - x0) * SCALE + 2.0 * MARGIN;
    let h = (y1 - y0) * SCALE + 2.0 * MARGIN + legend_h;
    let px = |x: f64| (x - x0) * SCALE + MARGIN;
    let py = |y: f64| (y1 - y) * SCALE + MARGIN;

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.2}\" height=\"{h:.2}\" viewBox=\"0 0 {w:.2} {h:.2}\">"
    );
    let vmax = edge_values.map(|v| v.iter().fold(0.0f64, |m, x| m.max(x.abs()))).unwrap_or(0.0);
    for (id, e) in t.edges().iter().enumerate() {
        let (a, b) = (pts[e.a], pts[e.b]);
        let color = match edge_values {
            Some(v) if vmax > 0.0 => diverging(v[id] / vmax),
            Some(_) => diverging(0.0),
            None => "#333333".to_string(),
        };
        let dash = if e.removed { " stroke-dasharray=\"6 4\"" } else { "" };
        let _ = writeln!(
            s,
            "<line data-edge=\"{id}\" x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"{color}\" stroke-width=\"3\"{dash}/>",
            px(a.x),
            py(a.y),
            px(b.x),
            py(b.y)
        );
    }
    if let Coloring::Flex(u) = coloring {
        let umax = u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let k = if umax > 0.0 { 0.4 / umax } else { 0.0 };
        for (i, p) in pts.iter().enumerate() {
            let (dx, dy) = (u[2 * i] * k, u[2 * i + 1] * k);
            let _ = writeln!(
                s,
                "<path class=\"flex\" d=\"M {:.3} {:.3} L {:.3} {:.3}\" stroke=\"#c03020\" stroke-width=\"2\"/>",
                px(p.x),
                py(p.y),
                px(p.x + dx),
                py(p.y + dy)
            );
        }
    }
    for (i, p) in pts.iter().enumerate() {
        let _ = writeln!(s, "<circle data-vertex=\"{i}\" cx=\"{:.3}\" cy=\"{:.3}\" r=\"4\" fill=\"#111111\"/>", px(p.x), py(p.y));
    }
    if edge_values.is_some() {
        let top = h - legend_h + 10.0;
        let steps = 10;
        for k in 0..=steps {
            let v = -1.0 + 2.0 * k as f64 / steps as f64;
            let _ = writeln!(
                s,
                "<rect x=\"{:.2}\" y=\"{top:.2}\" width=\"12\" height=\"10\" fill=\"{}\"/>",
                MARGIN + 12.0 * k as f64,
                diverging(v)
            );
        }
        let _ = writeln!(
            s,
            "<text x=\"{MARGIN:.2}\" y=\"{:.2}\" font-size=\"9\">{:.3e} .. {:.3e}</text>",
            top + 22.0,
            -vmax,
            vmax
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}
