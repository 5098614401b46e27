//! Planar SVG rendering of subdivisions for `n <= 3`.
//!
//! `p2` sits at the top, `p1` bottom left and `p3` bottom right. Output is
//! fully determined by the input: elements are emitted in sorted simplex
//! order with fixed-precision coordinates.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::complex::{ChromaticComplex, ChromaticVertex, Simplex};
use crate::procset::Color;
use crate::subdivision::Realize;

const PANEL: f64 = 440.0;
const TITLE: f64 = 28.0;

pub fn process_color(c: Color) -> &'static str {
    match c.id() {
        1 => "#d62728",
        2 => "#1f77b4",
        3 => "#2ca02c",
        4 => "#9467bd",
        _ => "#8c564b",
    }
}

/// A set of simplices drawn with one fill color.
pub struct Layer<V> {
    pub fill: String,
    pub simplices: BTreeSet<Simplex<V>>,
}

impl<V: ChromaticVertex> Layer<V> {
    pub fn new<I: IntoIterator<Item = Simplex<V>>>(fill: &str, simplices: I) -> Self {
        Self { fill: fill.to_string(), simplices: simplices.into_iter().collect() }
    }
}

/// One drawing: the base complex in outline plus highlighted layers on top.
pub struct Panel<'a, V> {
    pub title: String,
    pub base: &'a ChromaticComplex<V>,
    pub layers: Vec<Layer<V>>,
}

fn corner(n: usize, i: usize) -> (f64, f64) {
    match (n, i) {
        (1, _) => (220.0, 220.0),
        (2, 0) => (40.0, 220.0),
        (2, _) => (400.0, 220.0),
        (_, 0) => (40.0, 392.0),
        (_, 1) => (220.0, 80.0),
        _ => (400.0, 392.0),
    }
}

fn project<V: Realize>(v: &V, n: usize, dx: f64) -> (f64, f64) {
    let bary = v.point(n);
    let (mut x, mut y) = (0.0, 0.0);
    for (i, w) in bary.iter().enumerate() {
        let (cx, cy) = corner(n, i);
        x += w * cx;
        y += w * cy;
    }
    (x + dx, y + TITLE)
}

fn fmt_point((x, y): (f64, f64)) -> String {
    format!("{x:.3},{y:.3}")
}

fn draw_simplex<V: ChromaticVertex + Realize>(out: &mut String, s: &Simplex<V>, n: usize, dx: f64, fill: &str) {
    let pts: Vec<(f64, f64)> = s.vertices().iter().map(|v| project(v, n, dx)).collect();
    match pts.len() {
        1 => {
            let (x, y) = pts[0];
            let _ = writeln!(out, r#"<circle cx="{x:.3}" cy="{y:.3}" r="5" fill="{fill}"/>"#);
        }
        2 => {
            let _ = writeln!(
                out,
                r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="{fill}" stroke-width="4"/>"#,
                pts[0].0, pts[0].1, pts[1].0, pts[1].1
            );
        }
        _ => {
            let joined: Vec<String> = pts.into_iter().map(fmt_point).collect();
            let _ = writeln!(
                out,
                r#"<polygon points="{}" fill="{fill}" fill-opacity="0.75" stroke="none"/>"#,
                joined.join(" ")
            );
        }
    }
}

pub fn render<V: ChromaticVertex + Realize>(panels: &[Panel<'_, V>]) -> String {
    let width = PANEL * panels.len().max(1) as f64;
    let height = PANEL;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (k, panel) in panels.iter().enumerate() {
        let dx = PANEL * k as f64;
        let n = panel.base.n();
        let _ = writeln!(out, r#"<g id="panel{k}">"#);
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
            dx + PANEL / 2.0,
            escape(&panel.title)
        );
        for layer in &panel.layers {
            // Larger simplices first, so edges and vertices stay visible.
            let mut ordered: Vec<&Simplex<V>> = layer.simplices.iter().collect();
            ordered.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
            for s in ordered {
                draw_simplex(&mut out, s, n, dx, &layer.fill);
            }
        }
        let edges: BTreeSet<Simplex<V>> = panel
            .base
            .facets()
            .iter()
            .flat_map(|f| f.faces().filter(|e| e.len() == 2).collect::<Vec<_>>())
            .collect();
        for e in &edges {
            let a = project(&e.vertices()[0], n, dx);
            let b = project(&e.vertices()[1], n, dx);
            let _ = writeln!(
                out,
                r##"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#444444" stroke-width="0.8"/>"##,
                a.0, a.1, b.0, b.1
            );
        }
        for v in panel.base.vertices() {
            let (x, y) = project(&v, n, dx);
            let _ = writeln!(
                out,
                r#"<circle cx="{x:.3}" cy="{y:.3}" r="2.2" fill="{}"/>"#,
                process_color(v.color())
            );
        }
        let _ = writeln!(out, "</g>");
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subdivision::chr_s;

    #[test]
    fn render_is_deterministic_and_counts_polygons() {
        let k = chr_s(3).unwrap();
        let panel = || Panel {
            title: "Chr s".into(),
            base: &k,
            layers: vec![Layer::new("#aec7e8", k.facets().iter().cloned())],
        };
        let a = render(&[panel()]);
        let b = render(&[panel()]);
        assert_eq!(a, b);
        assert_eq!(a.matches("<polygon").count(), 13);
        assert!(a.starts_with("<svg"));
    }
}
