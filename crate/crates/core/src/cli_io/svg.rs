//! SVG rendering of instances, drawings and intermediate regions.
//!
//! Coordinates are written as decimals with 20 significant digits. The
//! y axis is flipped with a group transform so the picture keeps the
//! mathematical orientation.

use std::fmt::Write as _;

use crate::geometry_core::{Point, SimplePolygon};
use crate::instance_model::Instance;
use crate::extension_solver::Drawing;

/// Significant digits used for every coordinate.
pub const SVG_DIGITS: usize = 20;

/// A filled region drawn under the chords.
#[derive(Debug, Clone)]
pub struct Highlight {
    pub polygon: SimplePolygon,
    pub fill: String,
    pub label: String,
}

#[derive(Debug, Clone, Default)]
pub struct SvgOptions {
    /// Refined polygons drawn as thin outlines, oldest first.
    pub layers: Vec<SimplePolygon>,
    pub highlights: Vec<Highlight>,
    /// A chord to mark with a dashed straight segment, such as the witness
    /// of a NO answer.
    pub witness_edge: Option<[usize; 2]>,
    /// Canvas width in pixels; the height follows the aspect ratio.
    pub width: Option<u32>,
}

fn num(r: &crate::geometry_core::Rational) -> String {
    r.to_decimal(SVG_DIGITS)
}

fn coords(p: &Point) -> String {
    format!("{},{}", num(&p.x), num(&p.y))
}

fn points_attr(pts: &[Point]) -> String {
    pts.iter().map(coords).collect::<Vec<_>>().join(" ")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Renders the instance boundary, optional layers and highlights, and the
/// drawn chords with their bends.
pub fn render_svg(inst: &Instance, drawing: Option<&Drawing>, opts: &SvgOptions) -> String {
    let bb = inst.boundary().bbox();
    let (x0, y0) = bb.min.to_f64();
    let (x1, y1) = bb.max.to_f64();
    let span = (x1 - x0).max(y1 - y0).max(f64::MIN_POSITIVE);
    let pad = span * 0.05;
    let (vw, vh) = (x1 - x0 + 2.0 * pad, y1 - y0 + 2.0 * pad);
    let width = opts.width.unwrap_or(800);
    let height = ((width as f64) * vh / vw).round().max(1.0) as u32;
    let stroke = span / 400.0;
    let dot = span / 160.0;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="{} {} {} {}">"#,
        x0 - pad,
        -(y1 + pad),
        vw,
        vh
    );
    let _ = writeln!(s, r#"<g transform="scale(1,-1)" stroke-linejoin="round">"#);
    let _ = writeln!(
        s,
        r##"<polygon class="boundary" points="{}" fill="#f4f4f4" stroke="#222" stroke-width="{}"/>"##,
        points_attr(inst.boundary().corners()),
        stroke * 1.5
    );
    for h in &opts.highlights {
        let _ = writeln!(
            s,
            r#"<polygon class="highlight" points="{}" fill="{}" fill-opacity="0.35" stroke="none"><title>{}</title></polygon>"#,
            points_attr(h.polygon.corners()),
            escape(&h.fill),
            escape(&h.label)
        );
    }
    let k = opts.layers.len().max(1) as f64;
    for (i, layer) in opts.layers.iter().enumerate() {
        // later steps are drawn more opaque
        let opacity = 0.15 + 0.75 * (i as f64 + 1.0) / k;
        let _ = writeln!(
            s,
            r##"<polygon class="layer" data-step="{i}" points="{}" fill="none" stroke="#3a7bd5" stroke-opacity="{opacity:.3}" stroke-width="{}"/>"##,
            points_attr(layer.corners()),
            stroke * 0.6
        );
    }
    if let Some([u, v]) = opts.witness_edge {
        if u < inst.n() && v < inst.n() {
            let _ = writeln!(
                s,
                r##"<line class="witness" data-edge="{u},{v}" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#8e44ad" stroke-width="{}" stroke-dasharray="{} {}"/>"##,
                num(&inst.vertex_point(u).x),
                num(&inst.vertex_point(u).y),
                num(&inst.vertex_point(v).x),
                num(&inst.vertex_point(v).y),
                stroke * 1.2,
                stroke * 6.0,
                stroke * 4.0
            );
        }
    }
    if let Some(d) = drawing {
        for c in &d.chords {
            let _ = writeln!(
                s,
                r##"<polyline class="chord" data-edge="{},{}" points="{}" fill="none" stroke="#c0392b" stroke-width="{}"/>"##,
                c.edge[0],
                c.edge[1],
                points_attr(&c.path),
                stroke
            );
            for b in &c.path[1..c.path.len().saturating_sub(1)] {
                let _ = writeln!(
                    s,
                    r##"<circle class="bend" cx="{}" cy="{}" r="{}" fill="#c0392b"/>"##,
                    num(&b.x),
                    num(&b.y),
                    dot * 0.7
                );
            }
        }
    }
    for v in 0..inst.n() {
        let p = inst.vertex_point(v);
        let _ = writeln!(
            s,
            r##"<circle class="vertex" data-vertex="{v}" cx="{}" cy="{}" r="{}" fill="#222"/>"##,
            num(&p.x),
            num(&p.y),
            dot
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry_core::Rational;
    use crate::extension_solver::ChordPath;

    fn square() -> Instance {
        let pts = [(0, 0), (3, 0), (3, 3), (0, 3)].map(|(x, y)| Point::int(x, y));
        Instance::new(pts.to_vec(), vec![0, 1, 2, 3], vec![[1, 3]]).unwrap()
    }

    #[test]
    fn renders_chords_bends_and_vertices() {
        let inst = square();
        let d = Drawing {
            chords: vec![ChordPath {
                edge: [1, 3],
                path: vec![Point::int(3, 0), Point::new(Rational::new(1, 3), Rational::new(1, 7)), Point::int(0, 3)],
            }],
        };
        let svg = render_svg(&inst, Some(&d), &SvgOptions::default());
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches(r#"class="vertex""#).count(), 4);
        assert_eq!(svg.matches(r#"class="bend""#).count(), 1);
        assert!(svg.contains("0.33333333333333333333,0.14285714285714285714"));
    }

    #[test]
    fn layers_and_highlights_are_emitted() {
        let inst = square();
        let opts = SvgOptions {
            layers: vec![inst.boundary().clone()],
            highlights: vec![Highlight {
                polygon: inst.boundary().clone(),
                fill: "#0a0".into(),
                label: "V(0) & V(2)".into(),
            }],
            witness_edge: Some([0, 2]),
            width: Some(300),
        };
        let svg = render_svg(&inst, None, &opts);
        assert!(svg.contains(r#"class="layer""#));
        assert!(svg.contains(r#"class="witness" data-edge="0,2""#));
        assert!(svg.contains("V(0) &amp; V(2)"));
        assert!(svg.contains(r#"width="300" height="300""#));
    }
}
