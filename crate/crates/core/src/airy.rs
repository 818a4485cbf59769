//! Piecewise-linear stress functions: tangent planes through the loaded vertices
//! and the web read off the creases of their lower envelope.

use crate::error::{Error, Result};
use crate::geom::{self, clip_halfplane, point_segment_distance, rotate90cw, tolerance, ConvexPolygon, Plane2, Point2, Vec2};
use crate::statics::{check_balance, ForceMultiplet};
use crate::web::{Node, NodeKind, Web};

/// One plane per gap between consecutive vertices: `planes[i]` is the plane
/// covering the part of the boundary between vertex `i - 1` and vertex `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentPlanes {
    pub planes: Vec<Plane2>,
    /// The plane after the last vertex; zero up to rounding for balanced forces.
    pub closure: Plane2,
}

impl TangentPlanes {
    pub fn len(&self) -> usize {
        self.planes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.planes.is_empty()
    }

    /// Forces recovered from the gradient jumps, `t_i = R(grad p_{i+1} - grad p_i)`.
    pub fn forces(&self) -> Vec<Vec2> {
        let n = self.planes.len();
        (0..n)
            .map(|i| {
                let next = if i + 1 == n { self.closure } else { self.planes[i + 1] };
                rotate90cw(next.gradient() - self.planes[i].gradient())
            })
            .collect()
    }
}

pub fn tangent_planes(f: &ForceMultiplet) -> Result<TangentPlanes> {
    let b = check_balance(f);
    if !b.balanced {
        return Err(Error::NotBalanced { force: b.force_residual.norm(), torque: b.torque_residual });
    }
    let mut planes = Vec::with_capacity(f.len());
    let (mut g, mut c) = (Vec2::ZERO, 0.0);
    for (&x, &t) in f.points().iter().zip(f.forces()) {
        planes.push(Plane2::from_gradient(g, c));
        let rt = rotate90cw(t);
        g -= rt;
        c += x.dot(rt);
    }
    Ok(TangentPlanes { planes, closure: Plane2::from_gradient(g, c) })
}

fn jump_scale(p: &TangentPlanes) -> f64 {
    p.forces().iter().map(|t| t.norm()).fold(0.0, f64::max)
}

/// Entry `[i][j]` is whether plane `i` lies on or above plane `j` at vertex `j`.
pub fn tangent_inequalities(p: &TangentPlanes, points: &[Point2]) -> Vec<Vec<bool>> {
    let scale = jump_scale(p) * geom::diameter(points);
    let tol = tolerance() * scale;
    let n = p.len();
    (0..n)
        .map(|i| (0..n).map(|j| p.planes[i].eval(points[j]) >= p.planes[j].eval(points[j]) - tol).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub plane: usize,
    /// Clockwise convex region, possibly reaching slightly outside the domain.
    pub region: Vec<Point2>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ridge {
    /// Indices into [`EnvelopeComplex::cells`].
    pub cells: (usize, usize),
    pub segment: (Point2, Point2),
    /// Gradient of the second cell's plane minus the first's.
    pub jump: Vec2,
}

/// Minimization diagram of a set of planes over a convex domain.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeComplex {
    pub planes: Vec<Plane2>,
    pub cells: Vec<Cell>,
    pub ridges: Vec<Ridge>,
    /// Ridge endpoints strictly inside the domain.
    pub apexes: Vec<Point2>,
    pub domain: Vec<Point2>,
}

impl EnvelopeComplex {
    pub fn value(&self, x: Point2) -> f64 {
        self.planes.iter().map(|p| p.eval(x)).fold(f64::INFINITY, f64::min)
    }
}

/// Envelope of the tangent planes over `domain`, after checking that no plane
/// dips below a vertex it does not belong to.
pub fn lower_envelope(p: &TangentPlanes, domain: &ConvexPolygon) -> Result<EnvelopeComplex> {
    let pts = domain.vertices();
    if pts.len() != p.len() {
        return Err(Error::InvalidInput("domain and planes differ in length".into()));
    }
    let ok = tangent_inequalities(p, pts);
    for j in 0..p.len() {
        for i in 0..p.len() {
            if !ok[i][j] {
                return Err(Error::InfeasiblePlanes { plane: i + 1, vertex: j + 1 });
            }
        }
    }
    Ok(envelope_of_planes(&p.planes, domain))
}

/// Same-plane test used for merging, relative to the gradient scale `g` and length `l`.
fn same_plane(p: &Plane2, q: &Plane2, g: f64, l: f64) -> bool {
    let tol = tolerance() * g.max(f64::MIN_POSITIVE);
    (p.a - q.a).abs() <= tol && (p.b - q.b).abs() <= tol && (p.c - q.c).abs() <= tol * l
}

/// Minimization diagram of arbitrary planes over a convex domain.
///
/// Cells are clipped to a slightly enlarged copy of the domain so that creases
/// running exactly along a boundary edge still appear as ridges; ridges are then
/// clipped back to the domain itself.
pub fn envelope_of_planes(planes: &[Plane2], domain: &ConvexPolygon) -> EnvelopeComplex {
    let verts = domain.vertices();
    let diam = domain.diameter();
    let centre = domain.centroid();
    let big: Vec<Point2> = verts.iter().map(|&v| centre + (v - centre) * 1.05).collect();
    let gscale = planes.iter().map(|p| p.gradient().norm()).fold(0.0, f64::max);

    let mut reps: Vec<usize> = Vec::new();
    for (i, p) in planes.iter().enumerate() {
        if !reps.iter().any(|&r| same_plane(&planes[r], p, gscale, diam)) {
            reps.push(i);
        }
    }

    let area_tol = 1e-12 * diam * diam;
    let mut cells = Vec::new();
    for &i in &reps {
        let mut region = big.clone();
        for &j in &reps {
            if j == i || region.is_empty() {
                continue;
            }
            let (pi, pj) = (planes[i], planes[j]);
            region = clip_halfplane(&region, pi.gradient() - pj.gradient(), pi.c - pj.c);
        }
        if region.len() >= 3 && geom::polygon_area(&region).abs() > area_tol {
            cells.push(Cell { plane: i, region });
        }
    }

    let line_tol = tolerance() * diam;
    let mut ridges = Vec::new();
    for ci in 0..cells.len() {
        for cj in ci + 1..cells.len() {
            let (pi, pj) = (planes[cells[ci].plane], planes[cells[cj].plane]);
            let jump = pj.gradient() - pi.gradient();
            let jn = jump.norm();
            if jn <= tolerance() * gscale {
                continue;
            }
            // the crease line is jump . x + (cj - ci) = 0
            let normal = jump * (1.0 / jn);
            let off = (pj.c - pi.c) / jn;
            let dir = rotate90cw(normal);
            let span = |region: &[Point2]| {
                let on: Vec<f64> = region
                    .iter()
                    .filter(|v| (normal.dot(**v) + off).abs() <= line_tol)
                    .map(|v| dir.dot(*v))
                    .collect();
                if on.len() < 2 {
                    return None;
                }
                let lo = on.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = on.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                Some((lo, hi))
            };
            let (Some(a), Some(b)) = (span(&cells[ci].region), span(&cells[cj].region)) else { continue };
            let (lo, hi) = (a.0.max(b.0), a.1.min(b.1));
            if hi - lo <= line_tol {
                continue;
            }
            let base = normal * (-off);
            let seg = (base + dir * lo, base + dir * hi);
            if let Some(segment) = clip_segment(seg, verts, line_tol) {
                if segment.0.dist(segment.1) > 1e-8 * diam {
                    ridges.push(Ridge { cells: (ci, cj), segment, jump });
                }
            }
        }
    }

    let snap = 1e-8 * diam;
    let mut apexes: Vec<Point2> = Vec::new();
    for r in &ridges {
        for p in [r.segment.0, r.segment.1] {
            let at_vertex = verts.iter().any(|v| v.dist(p) <= snap);
            if !at_vertex && !apexes.iter().any(|a| a.dist(p) <= snap) {
                apexes.push(p);
            }
        }
    }
    EnvelopeComplex { planes: planes.to_vec(), cells, ridges, apexes, domain: verts.to_vec() }
}

/// Clips a segment to a clockwise convex polygon. Edges the segment runs along
/// (within `tol`) only reject it when it lies beyond them by more than `tol`;
/// the others cut it exactly.
fn clip_segment(seg: (Point2, Point2), poly: &[Point2], tol: f64) -> Option<(Point2, Point2)> {
    let (a, b) = seg;
    let d = b - a;
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    let n = poly.len();
    for i in 0..n {
        let (p, q) = (poly[i], poly[(i + 1) % n]);
        let e = q - p;
        let len = e.norm();
        // signed distance to the right of the edge, positive inside
        let fa = -e.cross(a - p) / len;
        let fd = -e.cross(d) / len;
        if fd.abs() <= tol {
            if fa + tol < 0.0 && fa + fd + tol < 0.0 {
                return None;
            }
            continue;
        }
        let t = -fa / fd;
        if fd > 0.0 {
            t0 = t0.max(t);
        } else {
            t1 = t1.min(t);
        }
        if t0 > t1 {
            return None;
        }
    }
    Some((a + d * t0, a + d * t1))
}

/// Web with a boundary node per domain vertex (zero loads) and one wire per
/// ridge, tension equal to the size of the gradient jump.
pub fn complex_to_web(e: &EnvelopeComplex) -> Web {
    let verts = &e.domain;
    let diam = geom::diameter(verts);
    let snap = 1e-8 * diam;
    let mut w = Web::new();
    for &v in verts {
        w.nodes.push(Node { pos: v, kind: NodeKind::Boundary, load: Vec2::ZERO });
    }
    let node_at = |w: &mut Web, p: Point2| -> usize {
        if let Some(i) = (0..verts.len()).find(|&i| verts[i].dist(p) <= snap) {
            return i;
        }
        if let Some(i) = (verts.len()..w.nodes.len()).find(|&i| w.nodes[i].pos.dist(p) <= snap) {
            return i;
        }
        w.add_node(p, NodeKind::Interior)
    };
    let mut raw = Vec::new();
    for r in &e.ridges {
        let a = node_at(&mut w, r.segment.0);
        let b = node_at(&mut w, r.segment.1);
        if a != b {
            raw.push((a, b, r.jump.norm()));
        }
    }
    // a node touching the middle of a ridge splits it
    for (a, b, t) in raw {
        let (pa, pb) = (w.nodes[a].pos, w.nodes[b].pos);
        let mut chain: Vec<(f64, usize)> = (0..w.nodes.len())
            .filter(|&v| v != a && v != b)
            .filter_map(|v| {
                let (d, s) = point_segment_distance(w.nodes[v].pos, pa, pb);
                (d <= snap && s > 0.0 && s < 1.0).then_some((s, v))
            })
            .collect();
        chain.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut prev = a;
        for v in chain.into_iter().map(|c| c.1).chain(std::iter::once(b)) {
            if v != prev && !w.edges.iter().any(|e| (e.a, e.b) == (prev, v) || (e.a, e.b) == (v, prev)) {
                w.add_edge(prev, v, t);
            }
            prev = v;
        }
    }
    w
}

/// Web of the envelope with the multiplet's forces attached as boundary loads.
pub fn envelope_to_web(e: &EnvelopeComplex, f: &ForceMultiplet) -> Result<Web> {
    let mut w = complex_to_web(e);
    w.attach_loads(f)?;
    Ok(w)
}

/// Tangent planes, envelope and web in one step.
pub fn envelope_web(f: &ForceMultiplet) -> Result<Web> {
    let domain = ConvexPolygon::new(f.points().to_vec())?;
    let planes = tangent_planes(f)?;
    let env = lower_envelope(&planes, &domain)?;
    envelope_to_web(&env, f)
}
