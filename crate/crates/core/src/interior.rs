//! Loads applied inside the convex hull of the other load points.
//!
//! The interior force `t1` at `y1` is first moved along its own line of action to
//! `x1 = y1 + s t1`, just outside the hull, which gives an ordinary convex problem.
//! If the envelope web does not already run straight from `x1` through `y1`, a
//! tilted "roof" (two planes meeting along the line through `x1` and `y1`, with
//! the wire's slope jump) is laid over the envelope until its crease is visible
//! all the way to `y1`. The wire between `x1` and `y1` is then cut away.

use std::f64::consts::FRAC_PI_2;

use crate::airy::{complex_to_web, envelope_of_planes, envelope_web, tangent_planes, TangentPlanes};
use crate::error::{Error, Result};
use crate::geom::{self, check_clockwise_convex, clockwise_hull, rotate90cw, tolerance, ConvexPolygon, Plane2, Point2, Vec2};
use crate::statics::{check_balance, torque_certificate, FeasibilityCertificate, ForceMultiplet};
use crate::web::{verify_equilibrium, NodeKind, Web};

/// Number of tilt angles sampled in `[0, pi/2)`.
pub const SCAN_STEPS: usize = 720;
/// Angular tolerance of the refined critical tilt.
pub const THETA_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct InteriorProblem {
    hull: ForceMultiplet,
    point: Point2,
    force: Vec2,
}

impl InteriorProblem {
    pub fn new(hull: ForceMultiplet, point: Point2, force: Vec2) -> Result<Self> {
        let polygon = ConvexPolygon::new(hull.points().to_vec())?;
        if !point.is_finite() || !force.is_finite() {
            return Err(Error::InvalidInput("non-finite interior load".into()));
        }
        if !polygon.contains_strict(point) {
            return Err(Error::InvalidInput("interior point is not strictly inside the hull".into()));
        }
        if force.norm() <= tolerance() * hull.max_force() || force.norm() == 0.0 {
            return Err(Error::InvalidInput("interior force is zero".into()));
        }
        let mut pts = hull.points().to_vec();
        let mut fs = hull.forces().to_vec();
        pts.push(point);
        fs.push(force);
        let b = check_balance(&ForceMultiplet::new(pts, fs)?);
        if !b.balanced {
            return Err(Error::NotBalanced { force: b.force_residual.norm(), torque: b.torque_residual });
        }
        Ok(InteriorProblem { hull, point, force })
    }

    pub fn hull(&self) -> &ForceMultiplet {
        &self.hull
    }

    pub fn point(&self) -> Point2 {
        self.point
    }

    pub fn force(&self) -> Vec2 {
        self.force
    }

    /// Hull loads followed by the interior load.
    pub fn loads(&self) -> (Vec<Point2>, Vec<Vec2>) {
        let mut pts = self.hull.points().to_vec();
        let mut fs = self.hull.forces().to_vec();
        pts.push(self.point);
        fs.push(self.force);
        (pts, fs)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Offset {
    pub x1: Point2,
    pub s: f64,
    /// Where the ray from `y1` along `t1` leaves the hull.
    pub s_exit: f64,
    /// Beyond this the extended polygon stops being convex (may be infinite).
    pub s_max: f64,
    /// Clockwise order of the extended polygon starting at `x1`: `None` is `x1`,
    /// `Some(i)` is hull vertex `i`.
    pub order: Vec<Option<usize>>,
}

fn ray_exit(origin: Point2, dir: Vec2, poly: &[Point2], skip: &[usize]) -> Option<(f64, usize)> {
    let n = poly.len();
    let mut best: Option<(f64, usize)> = None;
    for i in (0..n).filter(|i| !skip.contains(i)) {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let e = b - a;
        let rate = e.cross(dir);
        if rate <= 0.0 {
            continue;
        }
        let s = -e.cross(origin - a) / rate;
        if best.map_or(true, |(bs, _)| s < bs) {
            best = Some((s, i));
        }
    }
    best
}

/// Moves `y1` outwards along `t1` far enough that it joins the hull vertices in
/// strictly convex position.
pub fn offset_point(y1: Point2, t1: Vec2, hull: &ConvexPolygon) -> Result<Offset> {
    if t1.norm() == 0.0 {
        return Err(Error::InvalidInput("interior force is zero".into()));
    }
    let v = hull.vertices();
    let n = v.len();
    let diam = hull.diameter();
    let (s_exit, i) = ray_exit(y1, t1, v, &[]).ok_or(Error::NoConvexExtension)?;
    let exit = y1 + t1 * s_exit;
    let (a, b) = (v[i], v[(i + 1) % n]);
    if exit.dist(a) <= 1e-9 * diam || exit.dist(b) <= 1e-9 * diam {
        return Err(Error::NoConvexExtension);
    }
    let mut s_max = f64::INFINITY;
    for (p, q) in [(v[(i + n - 1) % n], a), (b, v[(i + 2) % n])] {
        let e = q - p;
        let rate = e.cross(t1);
        if rate > 0.0 {
            s_max = s_max.min(-e.cross(y1 - p) / rate);
        }
    }
    if s_max <= s_exit {
        return Err(Error::NoConvexExtension);
    }
    let s = if 1.25 * s_exit < s_max { 1.25 * s_exit } else { 0.5 * (s_exit + s_max) };
    let mut order = vec![None];
    order.extend((1..=n).map(|k| Some((i + k) % n)));
    let x1 = y1 + t1 * s;
    let pts: Vec<Point2> = order.iter().map(|o| o.map_or(x1, |k| v[k])).collect();
    check_clockwise_convex(&pts).map_err(|_| Error::NoConvexExtension)?;
    Ok(Offset { x1, s, s_exit, s_max, order })
}

/// Roof over the crease through `x1`: `min(p0, p1) + shift`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoofFunction {
    pub base: (Plane2, Plane2),
    pub shift: Plane2,
    pub theta: f64,
    /// Value of the shift at `x1`.
    pub height: f64,
    /// Slope of the shift across the crease.
    pub sway: f64,
}

impl RoofFunction {
    pub fn faces(&self) -> [Plane2; 2] {
        [self.base.0.shifted(&self.shift), self.base.1.shifted(&self.shift)]
    }

    pub fn eval(&self, x: Point2) -> f64 {
        self.base.0.eval(x).min(self.base.1.eval(x)) + self.shift.eval(x)
    }
}

/// The extended convex problem with everything the roof scan needs.
#[derive(Debug, Clone, PartialEq)]
pub struct InteriorSetup {
    pub problem: InteriorProblem,
    pub offset: Offset,
    /// Extended multiplet, `x1` first, clockwise.
    pub extended: ForceMultiplet,
    pub planes: TangentPlanes,
    pub domain: ConvexPolygon,
    pub certificate: FeasibilityCertificate,
    /// Unit vector from `x1` towards `y1`.
    pub dir: Vec2,
    pub normal: Vec2,
    /// Distance from `x1` to `y1`.
    pub target: f64,
    /// Distance from `x1` to where the crease line leaves the domain.
    pub exit: f64,
    /// Extent of the envelope's own crease from `x1` along `dir`.
    pub base_reach: f64,
    /// `(u, v, m)` for every extended vertex: coordinates along/across the crease
    /// and how far `min(p0, p1)` sits above the envelope there.
    base_points: Vec<(f64, f64, f64)>,
}

pub fn prepare(problem: &InteriorProblem) -> Result<InteriorSetup> {
    let hull = ConvexPolygon::new(problem.hull.points().to_vec())?;
    let offset = offset_point(problem.point, problem.force, &hull)?;
    let pts: Vec<Point2> = offset.order.iter().map(|o| o.map_or(offset.x1, |k| problem.hull.points()[k])).collect();
    let fs: Vec<Vec2> = offset.order.iter().map(|o| o.map_or(problem.force, |k| problem.hull.forces()[k])).collect();
    let extended = ForceMultiplet::new(pts, fs)?;
    let domain = ConvexPolygon::new(extended.points().to_vec())?;
    let planes = tangent_planes(&extended)?;
    let certificate = torque_certificate(extended.points(), extended.forces());

    let x1 = offset.x1;
    let dir = (problem.point - x1).normalized().ok_or(Error::NoConvexExtension)?;
    let normal = rotate90cw(dir);
    let target = problem.point.dist(x1);
    let n = extended.len();
    let exit = ray_exit(x1, dir, extended.points(), &[0, n - 1]).map_or(target, |(s, _)| s);
    let (p0, p1) = (planes.planes[0], planes.planes[1]);
    let base_points = extended
        .points()
        .iter()
        .map(|&x| {
            let env = planes.planes.iter().map(|p| p.eval(x)).fold(f64::INFINITY, f64::min);
            let m = (p0.eval(x).min(p1.eval(x)) - env).max(0.0);
            ((x - x1).dot(dir), (x - x1).dot(normal), m)
        })
        .collect();
    let mut setup = InteriorSetup {
        problem: problem.clone(),
        offset,
        extended,
        planes,
        domain,
        certificate,
        dir,
        normal,
        target,
        exit,
        base_reach: 0.0,
        base_points,
    };
    setup.base_reach = setup.visible_interval(0.0, 0.0, true).map_or(0.0, |(_, hi)| hi);
    Ok(setup)
}

impl InteriorSetup {
    fn length_tol(&self) -> f64 {
        tolerance() * self.domain.diameter()
    }

    /// Interval of `u` in `[0, exit]` on which `h + slope * u` lies below every
    /// tangent plane along the crease line (`inclusive` allows equality).
    fn visible_interval(&self, h: f64, slope: f64, inclusive: bool) -> Option<(f64, f64)> {
        let x1 = self.offset.x1;
        let fscale = self.extended.max_force();
        let slack = if inclusive { tolerance() * fscale * self.domain.diameter() } else { 0.0 };
        let (mut lo, mut hi) = (0.0f64, self.exit);
        for p in &self.planes.planes {
            // h + slope u - p(x1 + u dir) < 0
            let a = h - p.eval(x1) - slack;
            let b = slope - p.gradient().dot(self.dir);
            if b.abs() <= f64::EPSILON * (slope.abs() + fscale) {
                if a >= 0.0 && !(inclusive && a <= 0.0) {
                    return None;
                }
                continue;
            }
            let root = -a / b;
            if b > 0.0 {
                hi = hi.min(root);
            } else {
                lo = lo.max(root);
            }
        }
        (hi - lo > self.length_tol()).then_some((lo, hi))
    }

    pub fn visible(&self, roof: &RoofFunction) -> Option<(f64, f64)> {
        self.visible_interval(roof.height, -roof.theta.tan(), false)
    }

    /// Reach of the crease from `x1` when the given roofs are laid over the envelope.
    pub fn reach(&self, roofs: &[RoofFunction]) -> f64 {
        let mut spans: Vec<(f64, f64)> = roofs.iter().filter_map(|r| self.visible(r)).collect();
        spans.sort_by(|a, b| a.0.total_cmp(&b.0));
        let tol = self.length_tol();
        let mut reach = self.base_reach;
        for (lo, hi) in spans {
            if lo <= reach + tol {
                reach = reach.max(hi);
            }
        }
        reach
    }

    /// Margins of the torque test with `y1` in place of `x1`; these do not depend on `s`.
    pub fn substituted_margins(&self) -> Vec<(usize, usize, f64)> {
        let mut pts = self.extended.points().to_vec();
        pts[0] = self.problem.point;
        crate::statics::partial_torque_sums(&pts, self.extended.forces())
    }

    pub fn extended_margins(&self) -> Vec<(usize, usize, f64)> {
        crate::statics::partial_torque_sums(self.extended.points(), self.extended.forces())
    }
}

/// Lowers and sways the roof with tilt `theta` until it rests on the base points.
pub fn fit_roof(setup: &InteriorSetup, theta: f64) -> Result<RoofFunction> {
    if !(0.0..FRAC_PI_2).contains(&theta) {
        return Err(Error::NoValidRoof { theta });
    }
    let slope = theta.tan();
    // h >= c_j - v_j * sigma for every base point; minimise h over sigma
    let lines: Vec<(f64, f64)> = setup.base_points.iter().map(|&(u, v, m)| (-m + slope * u, v)).collect();
    if !lines.iter().any(|l| l.1 > 0.0) || !lines.iter().any(|l| l.1 < 0.0) {
        return Err(Error::NoValidRoof { theta });
    }
    let h_at = |sigma: f64| lines.iter().map(|&(c, v)| c - v * sigma).fold(f64::NEG_INFINITY, f64::max);
    // the optimum sits where two base points are touched; among equally low
    // placements take the least swayed
    let mut candidates = Vec::new();
    for (i, &(ci, vi)) in lines.iter().enumerate() {
        for &(cj, vj) in &lines[i + 1..] {
            if vi != vj {
                let s = (ci - cj) / (vi - vj);
                candidates.push((s, ci - vi * s));
            }
        }
    }
    let best = candidates.iter().map(|&(s, _)| h_at(s)).fold(f64::INFINITY, f64::min);
    let scale = 1e-12 * (1.0 + best.abs() + lines.iter().map(|l| l.0.abs()).fold(0.0, f64::max));
    let sigma = candidates
        .into_iter()
        .filter(|&(s, touch)| h_at(s) <= best + scale && touch >= best - scale)
        .map(|(s, _)| s)
        .min_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(0.0);
    let height = h_at(sigma);
    if !height.is_finite() {
        return Err(Error::NoValidRoof { theta });
    }
    let x1 = setup.offset.x1;
    let grad = setup.dir * (-slope) + setup.normal * sigma;
    let shift = Plane2::from_gradient(grad, height - grad.dot(x1));
    Ok(RoofFunction {
        base: (setup.planes.planes[0], setup.planes.planes[1]),
        shift,
        theta,
        height,
        sway: sigma,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanSample {
    pub theta: f64,
    pub height: f64,
    pub visible: Option<(f64, f64)>,
    /// Connected crease length from `x1` with this roof alone.
    pub reach: f64,
}

/// Record of the tilt scan; the certificate for an exhausted search.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScanTrace {
    /// Distance from `x1` to `y1` that the crease must cover.
    pub target: f64,
    /// Crease length of the plain envelope.
    pub base_reach: f64,
    pub samples: Vec<ScanSample>,
    /// Smallest tilt (refined by bisection) whose crease reaches `y1`.
    pub critical_theta: Option<f64>,
    /// Tilts of the roofs combined by break repair.
    pub repair: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InfeasibleReason {
    /// The extended multiplet fails the torque test: no web exists.
    TorqueViolation { pair: (usize, usize), margin: f64 },
    /// The roof scan found no tilt (or combination of tilts) reaching `y1`.
    ScanExhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InteriorSolution {
    /// Boundary nodes are the hull points in input order followed by `y1`.
    pub web: Web,
    pub x1: Point2,
    pub s: f64,
    pub roofs: Vec<RoofFunction>,
    /// Grid tilt of the roof used (0 when the envelope already passes through `y1`).
    pub theta: f64,
    pub trace: ScanTrace,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InteriorOutcome {
    Supported(InteriorSolution),
    Infeasible { reason: InfeasibleReason, trace: ScanTrace },
}

impl InteriorOutcome {
    pub fn web(&self) -> Option<&Web> {
        match self {
            InteriorOutcome::Supported(s) => Some(&s.web),
            InteriorOutcome::Infeasible { .. } => None,
        }
    }
}

/// Removes the straight wire from boundary node `xi` to `y`, moving the node to
/// `y` with load `load`. Fails if the wire does not run straight from `xi` to `y`.
fn cut_wire(w: &Web, xi: usize, y: Point2, load: Vec2) -> Result<Web> {
    let x = w.nodes[xi].pos;
    let len = x.dist(y);
    let d = (y - x) * (1.0 / len);
    let tol = 1e-8 * w.diameter();
    let on_line = |p: Point2| (p - x).cross(d).abs() <= tol;
    let param = |p: Point2| (p - x).dot(d);
    let at_y = (0..w.nodes.len()).find(|&i| i != xi && w.nodes[i].pos.dist(y) <= tol);

    let mut out = Web { nodes: w.nodes.clone(), edges: Vec::new() };
    let mut straddle = Vec::new();
    for e in &w.edges {
        let (pa, pb) = (w.nodes[e.a].pos, w.nodes[e.b].pos);
        if on_line(pa) && on_line(pb) {
            let (ua, ub) = (param(pa), param(pb));
            let (lo, hi) = (ua.min(ub), ua.max(ub));
            if lo >= -tol && hi <= len + tol {
                continue;
            }
            if lo < len - tol && hi > len + tol {
                let far = if ua > ub { e.a } else { e.b };
                straddle.push((far, e.tension));
                continue;
            }
        }
        out.edges.push(*e);
    }
    if out.edges.iter().any(|e| e.a == xi || e.b == xi) {
        return Err(Error::InvalidInput("offset vertex keeps wires off the cut line".into()));
    }
    out.nodes[xi].pos = y;
    out.nodes[xi].load = load;
    out.nodes[xi].kind = NodeKind::Boundary;
    for (far, t) in straddle {
        out.add_edge(xi, far, t);
    }
    if let Some(z) = at_y {
        for e in &mut out.edges {
            if e.a == z {
                e.a = xi;
            }
            if e.b == z {
                e.b = xi;
            }
        }
        let extra = out.nodes[z].load;
        out.nodes[xi].load += extra;
        out.nodes.remove(z);
        for e in &mut out.edges {
            if e.a > z {
                e.a -= 1;
            }
            if e.b > z {
                e.b -= 1;
            }
        }
    }
    Ok(out.canonicalize())
}

/// Reorders boundary nodes by `perm[new] = old` (over boundary positions only).
fn reorder_boundary(w: &Web, perm: &[usize]) -> Web {
    let b = w.boundary_indices();
    let interior = w.interior_indices();
    let order: Vec<usize> = perm.iter().map(|&k| b[k]).chain(interior).collect();
    let mut map = vec![0; w.nodes.len()];
    for (new, &old) in order.iter().enumerate() {
        map[old] = new;
    }
    let mut out = Web { nodes: order.iter().map(|&i| w.nodes[i]).collect(), edges: w.edges.clone() };
    for e in &mut out.edges {
        e.a = map[e.a];
        e.b = map[e.b];
    }
    out
}

fn check_supported(w: &Web) -> Result<()> {
    let r = verify_equilibrium(w)?;
    if r.in_equilibrium && r.all_tensile {
        Ok(())
    } else {
        let nodes = (0..w.nodes.len()).filter(|&i| r.residuals[i].norm() > tolerance() * w.max_tension()).collect();
        Err(Error::Infeasible { residual: r.max_node_residual, nodes })
    }
}

/// Envelope web of the tangent planes and roofs, cut at `y1`, verified.
pub fn roof_web(setup: &InteriorSetup, roofs: &[RoofFunction]) -> Result<Web> {
    let mut planes = setup.planes.planes.clone();
    for r in roofs {
        planes.extend(r.faces());
    }
    let env = envelope_of_planes(&planes, &setup.domain);
    let mut w = complex_to_web(&env);
    w.attach_loads(&setup.extended)?;
    let cut = cut_wire(&w, 0, setup.problem.point, setup.problem.force)?;
    // extended position k holds hull vertex order[k]; y1 sits at position 0
    let m = setup.problem.hull.len();
    let mut perm = vec![0; m + 1];
    for (k, o) in setup.offset.order.iter().enumerate() {
        match o {
            Some(i) => perm[*i] = k,
            None => perm[m] = k,
        }
    }
    let out = reorder_boundary(&cut, &perm);
    check_supported(&out)?;
    Ok(out)
}

/// The plain envelope web, if it already carries a straight wire from `x1`
/// through `y1`.
pub fn easiest_case(problem: &InteriorProblem) -> Result<Option<Web>> {
    let setup = prepare(problem)?;
    if !setup.certificate.feasible {
        return Ok(None);
    }
    if setup.base_reach < setup.target - setup.length_tol() {
        return Ok(None);
    }
    roof_web(&setup, &[]).map(Some)
}

fn sample(setup: &InteriorSetup, theta: f64) -> Option<(RoofFunction, ScanSample)> {
    let roof = fit_roof(setup, theta).ok()?;
    let visible = setup.visible(&roof);
    let reach = setup.reach(std::slice::from_ref(&roof));
    Some((roof, ScanSample { theta, height: roof.height, visible, reach }))
}

pub fn solve_single_interior(problem: &InteriorProblem) -> Result<InteriorOutcome> {
    let setup = prepare(problem)?;
    let mut trace = ScanTrace { target: setup.target, base_reach: setup.base_reach, ..Default::default() };
    if let Some(pair) = setup.certificate.violating_pair {
        let reason = InfeasibleReason::TorqueViolation { pair, margin: setup.certificate.min_margin };
        return Ok(InteriorOutcome::Infeasible { reason, trace });
    }
    let tol = setup.length_tol();
    let solved = |web, roofs, theta, trace| {
        InteriorOutcome::Supported(InteriorSolution { web, x1: setup.offset.x1, s: setup.offset.s, roofs, theta, trace })
    };
    if setup.base_reach >= setup.target - tol {
        if let Ok(web) = roof_web(&setup, &[]) {
            return Ok(solved(web, Vec::new(), 0.0, trace));
        }
    }

    let grid: Vec<f64> = (0..SCAN_STEPS).map(|k| FRAC_PI_2 * k as f64 / SCAN_STEPS as f64).collect();
    let mut roofs_by_theta = Vec::with_capacity(grid.len());
    for &theta in &grid {
        match sample(&setup, theta) {
            Some((roof, s)) => {
                trace.samples.push(s);
                roofs_by_theta.push(Some(roof));
            }
            None => roofs_by_theta.push(None),
        }
    }
    let reaches = |k: usize| trace_reach(&trace, grid[k]);

    for k in 1..grid.len() {
        if reaches(k).map_or(true, |r| r < setup.target - tol) {
            continue;
        }
        let Some(roof) = roofs_by_theta[k] else { continue };
        if let Ok(web) = roof_web(&setup, &[roof]) {
            // refine the smallest reaching tilt inside (grid[k-1], grid[k]]
            let (mut lo, mut hi) = (grid[k - 1], grid[k]);
            while hi - lo > THETA_TOLERANCE {
                let mid = 0.5 * (lo + hi);
                let ok = sample(&setup, mid).is_some_and(|(_, s)| s.reach >= setup.target - tol);
                if ok {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            trace.critical_theta = Some(hi);
            return Ok(solved(web, vec![roof], grid[k], trace));
        }
    }

    // break repair: chain roofs of increasing tilt, each extending the crease
    let mut chosen: Vec<RoofFunction> = Vec::new();
    let mut reach = setup.base_reach;
    let mut next = 1;
    while chosen.len() < setup.extended.len() && reach < setup.target - tol {
        let pick = (next..grid.len()).find(|&k| {
            roofs_by_theta[k]
                .and_then(|r| setup.visible(&r))
                .is_some_and(|(lo, hi)| lo <= reach + tol && hi > reach + tol)
        });
        let Some(k) = pick else { break };
        let roof = roofs_by_theta[k].unwrap();
        chosen.push(roof);
        trace.repair.push(grid[k]);
        reach = setup.reach(&chosen);
        next = k + 1;
    }
    if reach >= setup.target - tol && !chosen.is_empty() {
        if let Ok(web) = roof_web(&setup, &chosen) {
            let theta = chosen.last().unwrap().theta;
            return Ok(solved(web, chosen, theta, trace));
        }
    }
    Ok(InteriorOutcome::Infeasible { reason: InfeasibleReason::ScanExhausted, trace })
}

fn trace_reach(trace: &ScanTrace, theta: f64) -> Option<f64> {
    trace.samples.iter().find(|s| s.theta == theta).map(|s| s.reach)
}

/// Several interior loads, handled only when every `y_j` already lies on the
/// envelope wire that ends at its offset point `x_j`.
pub fn multi_interior_easiest(hull: &ForceMultiplet, interior: &[(Point2, Vec2)]) -> Result<Option<Web>> {
    if interior.is_empty() {
        return envelope_web(hull).map(Some);
    }
    let polygon = ConvexPolygon::new(hull.points().to_vec())?;
    let diam = polygon.diameter();
    let mut pts = hull.points().to_vec();
    let mut fs = hull.forces().to_vec();
    for &(y, t) in interior {
        if !polygon.contains_strict(y) {
            return Err(Error::InvalidInput("interior point is not strictly inside the hull".into()));
        }
        pts.push(offset_point(y, t, &polygon)?.x1);
        fs.push(t);
    }
    let h = clockwise_hull(&pts)?;
    if !h.interior.is_empty() {
        return Err(Error::NoConvexExtension);
    }
    let order = h.hull_indices;
    let ext = ForceMultiplet::new(order.iter().map(|&i| pts[i]).collect(), order.iter().map(|&i| fs[i]).collect())?;
    let mut web = envelope_web(&ext)?;
    let m = hull.len();
    // cut in decreasing boundary position so earlier indices stay valid
    let mut cuts: Vec<(usize, usize)> =
        (0..interior.len()).map(|j| (order.iter().position(|&i| i == m + j).unwrap(), j)).collect();
    let tol = tolerance() * diam;
    for &(k, j) in &cuts {
        let (y, _) = interior[j];
        let x = web.nodes[k].pos;
        let first = web.edges.iter().find(|e| e.a == k || e.b == k).copied();
        let ok = first.is_some_and(|e| {
            let other = web.nodes[if e.a == k { e.b } else { e.a }].pos;
            let (dist, t) = geom::point_segment_distance(y, x, other);
            web.degree(k) == 1 && dist <= tol && t > 0.0
        });
        if !ok {
            return Ok(None);
        }
    }
    cuts.sort();
    for &(k, j) in cuts.iter().rev() {
        let (y, t) = interior[j];
        web = cut_wire(&web, k, y, t)?;
    }
    // boundary positions are unchanged by the cuts; put them in input order
    let perm: Vec<usize> = (0..pts.len()).map(|i| order.iter().position(|&o| o == i).unwrap()).collect();
    let out = reorder_boundary(&web, &perm);
    check_supported(&out)?;
    Ok(Some(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;
    use crate::web::boundary_forces;

    /// Octagon radial loads with the first vertex's load moved along its spoke to
    /// `fraction * x0` (negative fractions land past the centre).
    fn spoke_problem(fraction: f64) -> InteriorProblem {
        let f = samples::regular_polygon_radial(8, 1.0);
        let hull = ForceMultiplet::new(f.points()[1..].to_vec(), f.forces()[1..].to_vec()).unwrap();
        let y1 = f.points()[0] * fraction;
        InteriorProblem::new(hull, y1, f.forces()[0]).unwrap()
    }

    #[test]
    fn offset_lands_on_ray_outside_hull() {
        let p = spoke_problem(0.5);
        let hull = ConvexPolygon::new(p.hull().points().to_vec()).unwrap();
        let o = offset_point(p.point(), p.force(), &hull).unwrap();
        let d = o.x1 - p.point();
        assert!(d.cross(p.force()).abs() < 1e-14 && d.dot(p.force()) > 0.0);
        assert!(hull.inside_margin(o.x1) < 0.0);
        assert!((o.s - 1.25 * o.s_exit).abs() < 1e-14);
        assert_eq!(o.order[0], None);
    }

    #[test]
    fn zero_force_rejected() {
        let hull = ConvexPolygon::new(samples::square_corners()).unwrap();
        assert!(offset_point(Vec2::ZERO, Vec2::ZERO, &hull).is_err());
    }

    #[test]
    fn point_on_hull_boundary_rejected() {
        let f = samples::square_radial();
        let hull = ForceMultiplet::new(f.points()[1..].to_vec(), f.forces()[1..].to_vec()).unwrap();
        // (1, 0) lies on the edge between (1,1) and (1,-1)
        assert!(InteriorProblem::new(hull, Vec2::new(1.0, 0.0), Vec2::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn exit_through_vertex_has_no_extension() {
        let hull = ConvexPolygon::new(samples::square_corners()).unwrap();
        let r = offset_point(Vec2::ZERO, Vec2::new(1.0, 1.0), &hull);
        assert_eq!(r, Err(Error::NoConvexExtension));
    }

    #[test]
    fn easiest_case_cuts_spoke() {
        let p = spoke_problem(0.5);
        let w = easiest_case(&p).unwrap().expect("y1 lies on the spoke");
        assert!(verify_equilibrium(&w).unwrap().in_equilibrium);
        let y = w.boundary_indices()[7];
        assert!(w.nodes[y].pos.dist(p.point()) < 1e-12);
        assert_eq!(w.degree(y), 1);
        let back = boundary_forces(&w).unwrap();
        let (_, loads) = p.loads();
        for (a, b) in back.forces().iter().zip(&loads) {
            assert!(a.dist(*b) < 1e-12);
        }
    }

    #[test]
    fn unbalanced_interior_load_rejected() {
        let f = samples::regular_polygon_radial(8, 1.0);
        let hull = ForceMultiplet::new(f.points()[1..].to_vec(), f.forces()[1..].to_vec()).unwrap();
        let r = InteriorProblem::new(hull, Vec2::new(0.1, 0.5), f.forces()[0]);
        assert!(matches!(r, Err(Error::NotBalanced { .. })));
    }

    #[test]
    fn point_past_the_centre_needs_a_roof() {
        let p = spoke_problem(-0.3);
        assert_eq!(easiest_case(&p).unwrap(), None);
        match solve_single_interior(&p).unwrap() {
            InteriorOutcome::Supported(s) => {
                assert!(!s.roofs.is_empty());
                assert!(s.theta > 0.0);
                let r = verify_equilibrium(&s.web).unwrap();
                assert!(r.in_equilibrium && r.all_tensile);
                let y = *s.web.boundary_indices().last().unwrap();
                assert!(s.web.nodes[y].pos.dist(p.point()) < 1e-12);
                assert!(s.web.nodes[y].load.dist(p.force()) < 1e-15);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_extension_is_reported() {
        // every load pulls inwards, so the extended multiplet fails the torque test
        let f = samples::regular_polygon_radial(7, 1.0).scaled(-1.0);
        let hull = ForceMultiplet::new(f.points()[1..].to_vec(), f.forces()[1..].to_vec()).unwrap();
        let p = InteriorProblem::new(hull, f.points()[0] * 0.5, f.forces()[0]).unwrap();
        match solve_single_interior(&p).unwrap() {
            InteriorOutcome::Infeasible { reason: InfeasibleReason::TorqueViolation { .. }, .. } => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn theta_zero_roof_is_the_ridge_pair() {
        let setup = prepare(&spoke_problem(0.5)).unwrap();
        let r = fit_roof(&setup, 0.0).unwrap();
        assert_eq!(r.height, 0.0);
        assert_eq!(r.sway, 0.0);
        assert!(r.shift.gradient().norm() < 1e-15);
    }

    #[test]
    fn vertical_tilt_has_no_roof() {
        let setup = prepare(&spoke_problem(0.5)).unwrap();
        assert!(matches!(fit_roof(&setup, FRAC_PI_2), Err(Error::NoValidRoof { .. })));
        assert!(matches!(fit_roof(&setup, 2.0), Err(Error::NoValidRoof { .. })));
    }

    #[test]
    fn fitted_roof_stays_above_base_points() {
        let setup = prepare(&spoke_problem(0.5)).unwrap();
        for theta in [0.1, 0.5, 1.0, 1.4] {
            let r = fit_roof(&setup, theta).unwrap();
            let mut touching = 0;
            for &x in setup.extended.points() {
                let env = setup.planes.planes.iter().map(|p| p.eval(x)).fold(f64::INFINITY, f64::min);
                assert!(r.eval(x) >= env - 1e-12);
                if (r.eval(x) - env).abs() < 1e-10 {
                    touching += 1;
                }
            }
            assert!(touching >= 2, "theta {theta}: {touching}");
        }
    }

    #[test]
    fn solver_takes_theta_zero_path_when_easiest() {
        match solve_single_interior(&spoke_problem(0.3)).unwrap() {
            InteriorOutcome::Supported(s) => {
                assert_eq!(s.theta, 0.0);
                assert!(s.roofs.is_empty());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn substituted_margins_do_not_depend_on_s() {
        let p = spoke_problem(0.5);
        let mut a = prepare(&p).unwrap();
        let m1 = a.substituted_margins();
        a.offset.x1 = p.point() + p.force() * (1.1 * a.offset.s_exit);
        let m2 = a.substituted_margins();
        for (x, y) in m1.iter().zip(&m2) {
            assert!((x.2 - y.2).abs() < 1e-12);
        }
    }

    #[test]
    fn multi_with_no_interior_points_is_plain_web() {
        let f = samples::regular_polygon_radial(6, 1.0);
        let w = multi_interior_easiest(&f, &[]).unwrap().unwrap();
        assert_eq!(w, envelope_web(&f).unwrap());
    }

    #[test]
    fn two_decagon_spokes_cut() {
        let f = samples::regular_polygon_radial(10, 1.0);
        let keep: Vec<usize> = (0..10).filter(|&i| i != 2 && i != 6).collect();
        let hull = ForceMultiplet::new(
            keep.iter().map(|&i| f.points()[i]).collect(),
            keep.iter().map(|&i| f.forces()[i]).collect(),
        )
        .unwrap();
        let inner = [(f.points()[2] * 0.5, f.forces()[2]), (f.points()[6] * 0.4, f.forces()[6])];
        let w = multi_interior_easiest(&hull, &inner).unwrap().expect("both points on their spokes");
        assert!(verify_equilibrium(&w).unwrap().in_equilibrium);
        let b = w.boundary_indices();
        assert!(w.nodes[b[8]].pos.dist(inner[0].0) < 1e-12);
        assert!(w.nodes[b[9]].pos.dist(inner[1].0) < 1e-12);

        let off = [(f.points()[2] * -0.2, f.forces()[2]), inner[1]];
        assert_eq!(multi_interior_easiest(&hull, &off).unwrap(), None);
    }
}
