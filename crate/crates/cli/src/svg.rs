//! Deterministic SVG drawings of webs: polygon, wires (width by tension,
//! compression in red) and load arrows.

use std::fmt::Write;

use tensionweb::geom::Vec2;
use tensionweb::web::{NodeKind, Web};

const SIZE: f64 = 600.0;
const PAD: f64 = 40.0;
const MAX_STROKE: f64 = 5.0;

struct Frame {
    min: Vec2,
    scale: f64,
    height: f64,
}

impl Frame {
    fn map(&self, p: Vec2) -> (f64, f64) {
        // screen y grows downwards
        (PAD + (p.x - self.min.x) * self.scale, self.height - PAD - (p.y - self.min.y) * self.scale)
    }
}

pub fn render(w: &Web, labels: bool) -> String {
    let max_load = w.max_load();
    let diam = w.diameter().max(f64::MIN_POSITIVE);
    // arrows get a fixed fraction of the drawing size
    let arrow = |load: Vec2| if max_load > 0.0 { load * (0.15 * diam / max_load) } else { Vec2::ZERO };

    let mut pts: Vec<Vec2> = w.nodes.iter().map(|n| n.pos).collect();
    pts.extend(w.nodes.iter().filter(|n| n.load.norm() > 0.0).map(|n| n.pos + arrow(n.load)));
    let (mut min, mut max) = (pts[0], pts[0]);
    for p in &pts {
        min = Vec2::new(min.x.min(p.x), min.y.min(p.y));
        max = Vec2::new(max.x.max(p.x), max.y.max(p.y));
    }
    let span = (max.x - min.x).max(max.y - min.y).max(f64::MIN_POSITIVE);
    let scale = (SIZE - 2.0 * PAD) / span;
    let width = 2.0 * PAD + (max.x - min.x) * scale;
    let height = 2.0 * PAD + (max.y - min.y) * scale;
    let frame = Frame { min, scale, height };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.1}" height="{height:.1}" viewBox="0 0 {width:.1} {height:.1}">"#
    );
    s.push_str(concat!(
        r#"<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="6" markerHeight="6" orient="auto">"#,
        r##"<path d="M0,0 L10,5 L0,10 z" fill="#2a7a2a"/></marker></defs>"##,
        "\n"
    ));
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    let boundary: Vec<usize> = w.boundary_indices();
    if boundary.len() >= 3 {
        let poly: Vec<String> = boundary
            .iter()
            .map(|&i| {
                let (x, y) = frame.map(w.nodes[i].pos);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(
            s,
            r##"<polygon points="{}" fill="#f4f4f4" stroke="#b0b0b0" stroke-dasharray="4 3"/>"##,
            poly.join(" ")
        );
    }

    let max_t = w.max_tension().max(f64::MIN_POSITIVE);
    for e in &w.edges {
        let (x1, y1) = frame.map(w.nodes[e.a].pos);
        let (x2, y2) = frame.map(w.nodes[e.b].pos);
        let stroke = 0.5 + (MAX_STROKE - 0.5) * e.tension.abs() / max_t;
        let colour = if e.tension < 0.0 { "#b22222" } else { "#1f3f6f" };
        let _ = writeln!(
            s,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{colour}" stroke-width="{stroke:.2}" stroke-linecap="round"/>"#
        );
        if labels {
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" font-size="11" font-family="sans-serif" fill="{colour}">{:.3}</text>"#,
                0.5 * (x1 + x2) + 3.0,
                0.5 * (y1 + y2) - 3.0,
                e.tension
            );
        }
    }

    for n in &w.nodes {
        let (x, y) = frame.map(n.pos);
        let (r, fill) = match n.kind {
            NodeKind::Boundary => (3.5, "#000000"),
            NodeKind::Interior => (2.0, "#555555"),
        };
        let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r}" fill="{fill}"/>"#);
        if n.load.norm() > 0.0 {
            let (tx, ty) = frame.map(n.pos + arrow(n.load));
            let _ = writeln!(
                s,
                r##"<line x1="{x:.2}" y1="{y:.2}" x2="{tx:.2}" y2="{ty:.2}" stroke="#2a7a2a" stroke-width="1.5" marker-end="url(#arrow)"/>"##
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
