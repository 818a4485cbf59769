//! Necessary conditions on three-dimensional webs: every planar projection of a
//! tension web is a planar tension web, and convex quadratic test fields give a
//! virtual-work inequality.

use nalgebra::{DMatrix, DVector, SymmetricEigen, Vector3};
pub use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::geom::{clockwise_hull, tolerance, ConvexPolygon, Point2, Vec2};
use crate::interior::offset_point;
use crate::nnls;
use crate::statics::{check_balance, torque_certificate, FeasibilityCertificate, ForceMultiplet};
use crate::web::{Edge, NodeKind, Web};

pub type Vec3 = Vector3<f64>;

#[derive(Debug, Clone, PartialEq)]
pub struct ForceMultiplet3 {
    points: Vec<Vec3>,
    forces: Vec<Vec3>,
}

impl ForceMultiplet3 {
    pub fn new(points: Vec<Vec3>, forces: Vec<Vec3>) -> Result<Self> {
        if points.len() != forces.len() {
            return Err(Error::InvalidInput(format!("{} points but {} forces", points.len(), forces.len())));
        }
        if points.iter().chain(&forces).any(|v| !v.iter().all(|c| c.is_finite())) {
            return Err(Error::InvalidInput("non-finite value".into()));
        }
        Ok(ForceMultiplet3 { points, forces })
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn forces(&self) -> &[Vec3] {
        &self.forces
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn max_force(&self) -> f64 {
        self.forces.iter().map(|t| t.norm()).fold(0.0, f64::max)
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i + 1..] {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    /// Net force and net torque about the origin.
    pub fn resultant(&self) -> (Vec3, Vec3) {
        let f = self.forces.iter().sum();
        let m = self.points.iter().zip(&self.forces).map(|(x, t)| x.cross(t)).sum();
        (f, m)
    }

    pub fn is_balanced(&self) -> bool {
        let (f, m) = self.resultant();
        let scale = self.max_force().max(f64::MIN_POSITIVE);
        f.norm() <= tolerance() * scale && m.norm() <= tolerance() * scale * self.diameter().max(1.0)
    }
}

/// Orthonormal in-plane frame `(e1, e2)` with `e1 x e2` along `normal`.
///
/// A normal along `+z` gives the coordinate axes.
pub fn projection_frame(normal: Vec3) -> Result<(Vec3, Vec3)> {
    let n = normal.try_normalize(0.0).ok_or_else(|| Error::InvalidInput("zero projection normal".into()))?;
    let helper = if n.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let e2 = n.cross(&helper).normalize();
    let e1 = e2.cross(&n);
    Ok((e1, e2))
}

fn flatten(v: &Vec3, frame: &(Vec3, Vec3)) -> Vec2 {
    Vec2::new(v.dot(&frame.0), v.dot(&frame.1))
}

/// Drops the normal components of points and forces.
pub fn project(m: &ForceMultiplet3, normal: Vec3) -> Result<ForceMultiplet> {
    let frame = projection_frame(normal)?;
    ForceMultiplet::new(
        m.points.iter().map(|x| flatten(x, &frame)).collect(),
        m.forces.iter().map(|t| flatten(t, &frame)).collect(),
    )
}

/// The 26 nonzero directions with components in `{-1, 0, 1}`.
pub fn lattice_directions() -> Vec<Vec3> {
    let mut out = Vec::with_capacity(26);
    for a in -1..=1 {
        for b in -1..=1 {
            for c in -1..=1 {
                if (a, b, c) != (0, 0, 0) {
                    out.push(Vec3::new(a as f64, b as f64, c as f64));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionReport {
    pub projected: ForceMultiplet,
    pub balanced: bool,
    /// Input indices in clockwise order of the extended polygon.
    pub order: Vec<usize>,
    /// Offset `s` along its force for each point inside the hull.
    pub offsets: Vec<(usize, f64)>,
    /// Interior points with zero projected force, left out.
    pub dropped: Vec<usize>,
    /// Torque test on the extended points; this is the verdict.
    pub extended: FeasibilityCertificate,
    /// Same order with the interior points moved back.
    pub substituted: FeasibilityCertificate,
    /// Points ordered clockwise by force direction.
    pub direction_order: FeasibilityCertificate,
}

impl ProjectionReport {
    pub fn feasible(&self) -> bool {
        self.balanced && self.extended.feasible
    }
}

/// Projects `m` onto the plane with the given normal and applies the planar
/// torque test. Points inside the hull of the projection are first slid
/// outwards along their force into convex position.
pub fn check_projection(m: &ForceMultiplet3, normal: Vec3) -> Result<ProjectionReport> {
    let projected = project(m, normal)?;
    let pts = projected.points();
    let forces = projected.forces();
    let scale = projected.diameter();
    for (i, a) in pts.iter().enumerate() {
        if pts[i + 1..].iter().any(|b| a.dist(*b) <= tolerance() * scale) {
            return Err(Error::DegenerateProjection);
        }
    }
    let hull = clockwise_hull(pts).map_err(|_| Error::DegenerateProjection)?;

    // (position, input index) in clockwise order
    let mut ring: Vec<(Point2, usize)> = hull.hull_indices.iter().map(|&i| (pts[i], i)).collect();
    let mut offsets = Vec::new();
    let mut dropped = Vec::new();
    for &i in &hull.interior {
        if forces[i].norm() <= tolerance() * projected.max_force() {
            dropped.push(i);
            continue;
        }
        let poly = ConvexPolygon::new(ring.iter().map(|r| r.0).collect())?;
        if poly.inside_margin(pts[i]) <= tolerance() * scale {
            return Err(Error::DegenerateProjection);
        }
        let off = offset_point(pts[i], forces[i], &poly).map_err(|_| Error::DegenerateProjection)?;
        // the new point goes just before the vertex that follows it
        let next = off.order[1].expect("offset order lists the hull after the new point");
        ring.insert(next, (off.x1, i));
        offsets.push((i, off.s));
    }

    // start at the lowest input label so convex planar input keeps its numbering
    let first = (0..ring.len()).min_by_key(|&k| ring[k].1).unwrap_or(0);
    ring.rotate_left(first);
    let order: Vec<usize> = ring.iter().map(|r| r.1).collect();
    let ext_pts: Vec<Point2> = ring.iter().map(|r| r.0).collect();
    let orig_pts: Vec<Point2> = order.iter().map(|&i| pts[i]).collect();
    let ord_forces: Vec<Vec2> = order.iter().map(|&i| forces[i]).collect();
    let extended = torque_certificate(&ext_pts, &ord_forces);
    let substituted = torque_certificate(&orig_pts, &ord_forces);

    let mut by_dir: Vec<usize> = (0..pts.len()).filter(|&i| forces[i].norm() > 0.0).collect();
    by_dir.sort_by(|&a, &b| (-forces[a].y.atan2(forces[a].x)).total_cmp(&-forces[b].y.atan2(forces[b].x)));
    let direction_order = torque_certificate(
        &by_dir.iter().map(|&i| pts[i]).collect::<Vec<_>>(),
        &by_dir.iter().map(|&i| forces[i]).collect::<Vec<_>>(),
    );

    Ok(ProjectionReport {
        balanced: check_balance(&projected).balanced,
        projected,
        order,
        offsets,
        dropped,
        extended,
        substituted,
        direction_order,
    })
}

/// `sum T_i . (A X_i)` for a symmetric positive semidefinite `A`; nonnegative
/// whenever a tension web carries the multiplet.
pub fn test_field_inequality(m: &ForceMultiplet3, a: &Matrix3<f64>) -> Result<(f64, bool)> {
    let anorm = a.abs().max();
    if (a - a.transpose()).abs().max() > tolerance() * anorm.max(f64::MIN_POSITIVE) {
        return Err(Error::InvalidInput("test tensor is not symmetric".into()));
    }
    let min_eigenvalue = SymmetricEigen::new(*a).eigenvalues.min();
    if min_eigenvalue < -tolerance() * anorm {
        return Err(Error::NotPsd { min_eigenvalue });
    }
    let value: f64 = m.points.iter().zip(&m.forces).map(|(x, t)| t.dot(&(a * x))).sum();
    let scale = m.max_force() * m.diameter().max(1.0) * anorm;
    Ok((value, value >= -tolerance() * scale))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node3 {
    pub pos: Vec3,
    pub kind: NodeKind,
    pub load: Vec3,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Web3 {
    pub nodes: Vec<Node3>,
    pub edges: Vec<Edge>,
}

impl Web3 {
    pub fn add_node(&mut self, pos: Vec3, kind: NodeKind) -> usize {
        self.nodes.push(Node3 { pos, kind, load: Vec3::zeros() });
        self.nodes.len() - 1
    }

    pub fn add_edge(&mut self, a: usize, b: usize, tension: f64) -> usize {
        self.edges.push(Edge { a, b, tension });
        self.edges.len() - 1
    }

    pub fn edge_length(&self, e: &Edge) -> f64 {
        (self.nodes[e.a].pos - self.nodes[e.b].pos).norm()
    }

    pub fn interior_indices(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].kind == NodeKind::Interior).collect()
    }

    pub fn degree(&self, node: usize) -> usize {
        self.edges.iter().filter(|e| e.a == node || e.b == node).count()
    }

    fn directions(&self) -> Result<Vec<Vec3>> {
        self.edges
            .iter()
            .enumerate()
            .map(|(k, e)| {
                let d = self.nodes[e.b].pos - self.nodes[e.a].pos;
                d.try_normalize(0.0).ok_or(Error::ZeroLengthEdge { edge: k })
            })
            .collect()
    }

    /// Loads at the boundary nodes, in node order.
    pub fn boundary_multiplet(&self) -> Result<ForceMultiplet3> {
        let b: Vec<&Node3> = self.nodes.iter().filter(|n| n.kind == NodeKind::Boundary).collect();
        ForceMultiplet3::new(b.iter().map(|n| n.pos).collect(), b.iter().map(|n| n.load).collect())
    }

    /// The planar web seen along `normal`; each member keeps the in-plane part of
    /// its pull.
    pub fn project(&self, normal: Vec3) -> Result<Web> {
        let frame = projection_frame(normal)?;
        let mut w = Web::new();
        for n in &self.nodes {
            let i = w.add_node(flatten(&n.pos, &frame), n.kind);
            w.nodes[i].load = flatten(&n.load, &frame);
        }
        for e in &self.edges {
            let l3 = self.edge_length(e);
            let l2 = w.nodes[e.a].pos.dist(w.nodes[e.b].pos);
            w.add_edge(e.a, e.b, e.tension * l2 / l3);
        }
        Ok(w)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumReport3 {
    pub max_node_residual: f64,
    pub residuals: Vec<Vec3>,
    pub in_equilibrium: bool,
    pub all_tensile: bool,
}

pub fn verify_equilibrium_3d(w: &Web3) -> Result<EquilibriumReport3> {
    let dirs = w.directions()?;
    let mut residuals: Vec<Vec3> = w.nodes.iter().map(|n| n.load).collect();
    for (e, d) in w.edges.iter().zip(dirs) {
        residuals[e.a] += d * e.tension;
        residuals[e.b] -= d * e.tension;
    }
    let max_node_residual = residuals.iter().map(|r| r.norm()).fold(0.0, f64::max);
    let scale = w.edges.iter().map(|e| e.tension.abs()).fold(0.0, f64::max)
        + w.nodes.iter().map(|n| n.load.norm()).fold(0.0, f64::max);
    Ok(EquilibriumReport3 {
        in_equilibrium: max_node_residual <= tolerance() * scale,
        all_tensile: w.edges.iter().all(|e| e.tension > 0.0),
        max_node_residual,
        residuals,
    })
}

/// Null space dimension of the interior equilibrium rows. A lone junction of
/// four wires gives 1: its tensions form a single ray.
pub fn interior_stress_nullity_3d(w: &Web3) -> Result<usize> {
    let dirs = w.directions()?;
    let interior = w.interior_indices();
    let mut a = DMatrix::zeros(3 * interior.len(), w.edges.len());
    for (r, &v) in interior.iter().enumerate() {
        for (k, (e, d)) in w.edges.iter().zip(&dirs).enumerate() {
            let sign = if e.a == v { 1.0 } else if e.b == v { -1.0 } else { 0.0 };
            for c in 0..3 {
                a[(3 * r + c, k)] += sign * d[c];
            }
        }
    }
    Ok(nnls::nullity(&a, 1e-10))
}

/// `(sum load . position, sum tension * length)`.
pub fn virtual_work_3d(w: &Web3) -> (f64, f64) {
    let loads = w.nodes.iter().map(|n| n.load.dot(&n.pos)).sum();
    let members = w.edges.iter().map(|e| e.tension * w.edge_length(e)).sum();
    (loads, members)
}

/// One interior node joined by a wire to each anchor, with positive tensions
/// (averaging 1) that balance the hub; the anchors carry the matching loads.
pub fn spider(centre: Vec3, anchors: &[Vec3]) -> Result<Web3> {
    let n = anchors.len();
    let dirs: Vec<Vec3> = anchors
        .iter()
        .enumerate()
        .map(|(k, a)| (a - centre).try_normalize(0.0).ok_or(Error::ZeroLengthEdge { edge: k }))
        .collect::<Result<_>>()?;
    let mut a = DMatrix::zeros(4, n);
    for (k, d) in dirs.iter().enumerate() {
        for c in 0..3 {
            a[(c, k)] = d[c];
        }
        a[(3, k)] = 1.0;
    }
    let b = DVector::from_vec(vec![0.0, 0.0, 0.0, n as f64]);
    let q = nnls::nnls(&a, &b);
    let residual = (&a * &q - &b).norm();
    if residual > tolerance() * n as f64 || q.iter().any(|&t| t <= tolerance()) {
        return Err(Error::Infeasible { residual, nodes: vec![n] });
    }
    let mut w = Web3::default();
    for (k, &p) in anchors.iter().enumerate() {
        let i = w.add_node(p, NodeKind::Boundary);
        w.nodes[i].load = dirs[k] * q[k];
    }
    let hub = w.add_node(centre, NodeKind::Interior);
    for (k, &t) in q.iter().enumerate() {
        w.add_edge(k, hub, t);
    }
    Ok(w)
}
