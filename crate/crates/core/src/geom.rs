//! Planar primitives shared by every other module.
//!
//! Predicates work on coordinates normalized to the bounding box of their
//! inputs, so the tolerance returned by [`tolerance`] is scale free.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

/// Default relative tolerance.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

// zero bits mean "use the default"
static TOLERANCE_BITS: AtomicU64 = AtomicU64::new(0);

/// Process-wide relative tolerance used by predicates and feasibility tests.
pub fn tolerance() -> f64 {
    match TOLERANCE_BITS.load(Ordering::Relaxed) {
        0 => DEFAULT_TOLERANCE,
        bits => f64::from_bits(bits),
    }
}

/// Overrides the process-wide tolerance. Non-positive or non-finite values are ignored.
pub fn set_tolerance(tau: f64) {
    if tau.is_finite() && tau > 0.0 {
        TOLERANCE_BITS.store(tau.to_bits(), Ordering::Relaxed);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

pub type Point2 = Vec2;

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    /// Unit vector, or `None` for the zero vector.
    pub fn normalized(self) -> Option<Vec2> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self * (1.0 / n))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn lerp(self, o: Vec2, t: f64) -> Vec2 {
        self + (o - self) * t
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl SubAssign for Vec2 {
    fn sub_assign(&mut self, o: Vec2) {
        self.x -= o.x;
        self.y -= o.y;
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl std::iter::Sum for Vec2 {
    fn sum<I: Iterator<Item = Vec2>>(iter: I) -> Vec2 {
        iter.fold(Vec2::ZERO, |a, b| a + b)
    }
}

/// Quarter turn clockwise: `(v1, v2) -> (v2, -v1)`.
pub fn rotate90cw(v: Vec2) -> Vec2 {
    Vec2::new(v.y, -v.x)
}

/// Affine function `x -> a*x1 + b*x2 + c`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Plane2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Plane2 {
    pub const ZERO: Plane2 = Plane2 { a: 0.0, b: 0.0, c: 0.0 };

    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        Plane2 { a, b, c }
    }

    pub fn from_gradient(g: Vec2, c: f64) -> Self {
        Plane2::new(g.x, g.y, c)
    }

    pub fn eval(&self, p: Point2) -> f64 {
        self.a * p.x + self.b * p.y + self.c
    }

    pub fn gradient(&self) -> Vec2 {
        Vec2::new(self.a, self.b)
    }

    /// Plane plus an affine term.
    pub fn shifted(&self, other: &Plane2) -> Plane2 {
        Plane2::new(self.a + other.a, self.b + other.b, self.c + other.c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Clockwise,
    Anticlockwise,
    Collinear,
}

/// Largest bounding-box side of a point set (at least the smallest positive normal).
pub fn extent(points: &[Point2]) -> f64 {
    let (mut lo, mut hi) = (Vec2::new(f64::MAX, f64::MAX), Vec2::new(f64::MIN, f64::MIN));
    for p in points {
        lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    if points.is_empty() {
        return f64::MIN_POSITIVE;
    }
    (hi.x - lo.x).max(hi.y - lo.y).max(f64::MIN_POSITIVE)
}

/// Largest pairwise distance.
pub fn diameter(points: &[Point2]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            d = d.max(p.dist(*q));
        }
    }
    d
}

/// Orientation of `p, q, r` with the cross product measured in units of `scale`.
pub fn orientation_scaled(p: Point2, q: Point2, r: Point2, scale: f64) -> Orientation {
    let c = (q - p).cross(r - p) / (scale * scale);
    if c > tolerance() {
        Orientation::Anticlockwise
    } else if c < -tolerance() {
        Orientation::Clockwise
    } else {
        Orientation::Collinear
    }
}

pub fn orientation(p: Point2, q: Point2, r: Point2) -> Orientation {
    orientation_scaled(p, q, r, extent(&[p, q, r]))
}

/// Strictly convex polygon with vertices in clockwise order.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
}

impl ConvexPolygon {
    /// Validates clockwise strict convexity; `NotConvex` names the 1-based offending vertex.
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        check_clockwise_convex(&vertices)?;
        Ok(ConvexPolygon { vertices })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, i: usize) -> Point2 {
        self.vertices[i % self.vertices.len()]
    }

    pub fn diameter(&self) -> f64 {
        diameter(&self.vertices)
    }

    pub fn area(&self) -> f64 {
        polygon_area(&self.vertices).abs()
    }

    pub fn centroid(&self) -> Point2 {
        self.vertices.iter().copied().sum::<Vec2>() * (1.0 / self.vertices.len() as f64)
    }

    /// Smallest distance from the vertex centroid to an edge line.
    pub fn inradius(&self) -> f64 {
        let c = self.centroid();
        let n = self.len();
        (0..n)
            .map(|i| {
                let (a, b) = (self.vertex(i), self.vertex(i + 1));
                ((b - a).cross(c - a) / a.dist(b)).abs()
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Signed distance-like test: positive strictly inside (clockwise polygon).
    pub fn inside_margin(&self, p: Point2) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| {
                let (a, b) = (self.vertex(i), self.vertex(i + 1));
                -(b - a).cross(p - a) / a.dist(b)
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains_strict(&self, p: Point2) -> bool {
        self.inside_margin(p) > tolerance() * self.diameter()
    }
}

pub(crate) fn polygon_area(v: &[Point2]) -> f64 {
    let n = v.len();
    (0..n).map(|i| v[i].cross(v[(i + 1) % n])).sum::<f64>() * 0.5
}

/// Checks that consecutive triples turn clockwise with no duplicate vertices.
pub fn check_clockwise_convex(vertices: &[Point2]) -> Result<()> {
    let n = vertices.len();
    if n < 3 {
        return Err(Error::InvalidInput(format!("polygon needs at least 3 vertices, got {n}")));
    }
    if vertices.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite coordinate".into()));
    }
    let scale = extent(vertices);
    for i in 0..n {
        let p = vertices[(i + n - 1) % n];
        let q = vertices[i];
        let r = vertices[(i + 1) % n];
        if q.dist(r) <= tolerance() * scale
            || orientation_scaled(p, q, r, scale) != Orientation::Clockwise
        {
            return Err(Error::NotConvex { vertex: i + 1 });
        }
    }
    // total turning must be one revolution, which rules out star polygons
    let winding: f64 = (0..n)
        .map(|i| {
            let a = vertices[(i + 1) % n] - vertices[i];
            let b = vertices[(i + 2) % n] - vertices[(i + 1) % n];
            a.cross(b).atan2(a.dot(b))
        })
        .sum();
    if (winding + 2.0 * std::f64::consts::PI).abs() > 1e-6 {
        return Err(Error::NotConvex { vertex: 1 });
    }
    Ok(())
}

/// Result of [`clockwise_hull`].
#[derive(Debug, Clone, PartialEq)]
pub struct Hull {
    pub polygon: ConvexPolygon,
    /// Input index of each hull vertex, in clockwise order.
    pub hull_indices: Vec<usize>,
    /// Input indices not on the hull (strictly interior, on an edge, or duplicates).
    pub interior: Vec<usize>,
}

/// Convex hull in clockwise order starting at the lexicographically smallest point.
pub fn clockwise_hull(points: &[Point2]) -> Result<Hull> {
    if points.len() < 3 {
        return Err(Error::AllCollinear);
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidInput("non-finite coordinate".into()));
    }
    let scale = extent(points);
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (points[i], points[j]);
        a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)).then(i.cmp(&j))
    });
    // monotone chain producing an anticlockwise hull, collinear points dropped
    let chain = |iter: &mut dyn Iterator<Item = usize>| {
        let mut h: Vec<usize> = Vec::new();
        for i in iter {
            if let Some(&last) = h.last() {
                if points[last].dist(points[i]) <= tolerance() * scale {
                    continue;
                }
            }
            while h.len() >= 2
                && orientation_scaled(points[h[h.len() - 2]], points[h[h.len() - 1]], points[i], scale)
                    != Orientation::Anticlockwise
            {
                h.pop();
            }
            h.push(i);
        }
        h
    };
    let lower = chain(&mut order.iter().copied());
    let upper = chain(&mut order.iter().rev().copied());
    let mut ccw: Vec<usize> = lower[..lower.len() - 1].to_vec();
    ccw.extend_from_slice(&upper[..upper.len() - 1]);
    if ccw.len() < 3 {
        return Err(Error::AllCollinear);
    }
    // reverse to clockwise, keeping the lexicographic minimum first
    let mut cw = vec![ccw[0]];
    cw.extend(ccw[1..].iter().rev());
    let vertices: Vec<Point2> = cw.iter().map(|&i| points[i]).collect();
    let polygon = ConvexPolygon::new(vertices)?;
    let interior = (0..points.len()).filter(|i| !cw.contains(i)).collect();
    Ok(Hull { polygon, hull_indices: cw, interior })
}

/// Proper crossing point of two segments.
///
/// Touching at an endpoint is not a crossing. Collinear overlapping segments give
/// [`Error::Overlap`].
pub fn segment_intersection(s1: (Point2, Point2), s2: (Point2, Point2)) -> Result<Option<Point2>> {
    let (p, p2) = s1;
    let (q, q2) = s2;
    let r = p2 - p;
    let s = q2 - q;
    let scale = extent(&[p, p2, q, q2]);
    let tol = tolerance();
    let denom = r.cross(s) / (scale * scale);
    let qp = q - p;
    if denom.abs() <= tol {
        // parallel; overlap only if collinear with a positive-length shared stretch
        let off = r.cross(qp) / (scale * r.norm().max(f64::MIN_POSITIVE));
        if off.abs() > tol {
            return Ok(None);
        }
        let rr = r.norm_sq();
        let t0 = qp.dot(r) / rr;
        let t1 = (q2 - p).dot(r) / rr;
        let (lo, hi) = (t0.min(t1).max(0.0), t0.max(t1).min(1.0));
        if (hi - lo) * r.norm() > tol * scale {
            return Err(Error::Overlap);
        }
        return Ok(None);
    }
    let rs = r.cross(s);
    let t = qp.cross(s) / rs;
    let u = qp.cross(r) / rs;
    let et = tol * scale / r.norm();
    let eu = tol * scale / s.norm();
    if t > et && t < 1.0 - et && u > eu && u < 1.0 - eu {
        Ok(Some(p + r * t))
    } else {
        Ok(None)
    }
}

/// Distance from `p` to segment `ab` and the parameter of the closest point.
pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> (f64, f64) {
    let d = b - a;
    let l2 = d.norm_sq();
    if l2 == 0.0 {
        return (p.dist(a), 0.0);
    }
    let t = ((p - a).dot(d) / l2).clamp(0.0, 1.0);
    (p.dist(a + d * t), t)
}

/// Clips a convex polygon to the half-plane `n . x + c <= 0`.
pub(crate) fn clip_halfplane(poly: &[Point2], n: Vec2, c: f64) -> Vec<Point2> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    let len = poly.len();
    for i in 0..len {
        let a = poly[i];
        let b = poly[(i + 1) % len];
        let fa = n.dot(a) + c;
        let fb = n.dot(b) + c;
        if fa <= 0.0 {
            out.push(a);
        }
        if (fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0) {
            let t = fa / (fa - fb);
            out.push(a.lerp(b, t));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point2 {
        Vec2::new(x, y)
    }

    #[test]
    fn rotate90cw_examples() {
        assert_eq!(rotate90cw(p(1.0, 0.0)), p(0.0, -1.0));
        assert_eq!(rotate90cw(p(0.0, 0.0)), p(0.0, 0.0));
        assert_eq!(rotate90cw(p(3.0, 4.0)), p(4.0, -3.0));
    }

    #[test]
    fn orientation_examples() {
        assert_eq!(orientation(p(0., 0.), p(1., 0.), p(1., 1.)), Orientation::Anticlockwise);
        assert_eq!(orientation(p(0., 0.), p(1., 0.), p(2., 0.)), Orientation::Collinear);
        assert_eq!(orientation(p(0., 0.), p(0., 1.), p(1., 1.)), Orientation::Clockwise);
    }

    #[test]
    fn orientation_is_scale_free() {
        for s in [1e-6, 1.0, 1e6] {
            assert_eq!(orientation(p(0., 0.), p(s, 0.), p(s, s)), Orientation::Anticlockwise);
        }
    }

    #[test]
    fn hull_of_square() {
        let pts = [p(1., 1.), p(-1., -1.), p(1., -1.), p(-1., 1.)];
        let h = clockwise_hull(&pts).unwrap();
        assert_eq!(h.polygon.vertices(), &[p(-1., -1.), p(-1., 1.), p(1., 1.), p(1., -1.)]);
        assert_eq!(h.hull_indices, vec![1, 3, 0, 2]);
        assert!(h.interior.is_empty());
    }

    #[test]
    fn hull_reports_center_as_interior() {
        let pts = [p(1., 1.), p(-1., -1.), p(0., 0.), p(1., -1.), p(-1., 1.)];
        let h = clockwise_hull(&pts).unwrap();
        assert_eq!(h.polygon.len(), 4);
        assert_eq!(h.interior, vec![2]);
    }

    #[test]
    fn hull_of_collinear_points_fails() {
        let pts = [p(0., 0.), p(1., 1.), p(2., 2.), p(3., 3.)];
        assert_eq!(clockwise_hull(&pts), Err(Error::AllCollinear));
    }

    #[test]
    fn hull_drops_edge_midpoints() {
        let pts = [p(0., 0.), p(1., 0.), p(2., 0.), p(1., 2.)];
        let h = clockwise_hull(&pts).unwrap();
        assert_eq!(h.polygon.len(), 3);
        assert_eq!(h.interior, vec![1]);
    }

    #[test]
    fn segment_intersection_examples() {
        let x = segment_intersection((p(0., 0.), p(1., 1.)), (p(0., 1.), p(1., 0.))).unwrap();
        let x = x.unwrap();
        assert!((x.x - 0.5).abs() < 1e-15 && (x.y - 0.5).abs() < 1e-15);
        assert_eq!(segment_intersection((p(0., 0.), p(1., 0.)), (p(0., 1.), p(1., 1.))), Ok(None));
        assert_eq!(segment_intersection((p(0., 0.), p(1., 0.)), (p(1., 0.), p(1., 1.))), Ok(None));
        assert_eq!(segment_intersection((p(0., 0.), p(1., 1.)), (p(1., 1.), p(2., 0.))), Ok(None));
    }

    #[test]
    fn collinear_overlap_is_error() {
        let r = segment_intersection((p(0., 0.), p(2., 0.)), (p(1., 0.), p(3., 0.)));
        assert_eq!(r, Err(Error::Overlap));
        // collinear, touching only at an endpoint
        let r = segment_intersection((p(0., 0.), p(1., 0.)), (p(1., 0.), p(3., 0.)));
        assert_eq!(r, Ok(None));
    }

    #[test]
    fn polygon_rejects_anticlockwise_and_collinear() {
        let ccw = vec![p(-1., -1.), p(1., -1.), p(1., 1.), p(-1., 1.)];
        assert!(matches!(ConvexPolygon::new(ccw), Err(Error::NotConvex { .. })));
        let flat = vec![p(-1., -1.), p(-1., 0.), p(-1., 1.), p(1., 1.), p(1., -1.)];
        assert_eq!(ConvexPolygon::new(flat), Err(Error::NotConvex { vertex: 2 }));
    }

    #[test]
    fn clip_square_by_diagonal() {
        let sq = [p(0., 0.), p(0., 1.), p(1., 1.), p(1., 0.)];
        let half = clip_halfplane(&sq, p(1., 1.), -1.0);
        assert!((polygon_area(&half).abs() - 0.5).abs() < 1e-15);
    }
}
