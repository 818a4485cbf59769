//! Trusses with compression and tension members carrying an arbitrary balanced
//! multiplet at the vertices of a convex polygon.
//!
//! The load is split as `t = lambda s + (t - lambda s)`. A compressive spoke
//! structure around a weighted centre carries `lambda s`; for large enough
//! `lambda` the remainder passes the torque test and a wire web carries it.
//! Short stubs tie the offset attachment points back to the true vertices.

use crate::airy::envelope_web;
use crate::cone::{cleave, cleave_with};
use crate::error::{Error, Result};
use crate::geom::{check_clockwise_convex, tolerance, ConvexPolygon, Point2, Vec2};
use crate::statics::{check_balance, check_tension_feasible, partial_torque_sums, ForceMultiplet};
use crate::web::{superimpose, verify_equilibrium, NodeKind, Web};

/// Relative margin applied to the lower bound on `lambda`.
pub const LAMBDA_MARGIN: f64 = 0.1;
/// Default ring size relative to the shortest spoke.
pub const DEFAULT_RHO: f64 = 0.2;

#[derive(Debug, Clone, PartialEq)]
pub struct SpokeData {
    pub centre: Point2,
    pub spokes: Vec<Vec2>,
}

/// Weighted centre `x0 = sum w_i x_i` and spoke directions `s_i = w_i (x0 - x_i)`.
///
/// When `forces` is given, a spoke parallel to its force is rejected.
pub fn spoke_data(points: &[Point2], weights: &[f64], forces: Option<&[Vec2]>) -> Result<SpokeData> {
    if points.len() != weights.len() {
        return Err(Error::InvalidInput(format!("{} points but {} weights", points.len(), weights.len())));
    }
    if weights.iter().any(|&w| !(w > 0.0)) {
        return Err(Error::InvalidInput("weights must be positive".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!("weights sum to {total}, not 1")));
    }
    let centre = points.iter().zip(weights).map(|(&p, &w)| p * w).sum::<Vec2>();
    let spokes: Vec<Vec2> = points.iter().zip(weights).map(|(&p, &w)| (centre - p) * w).collect();
    if let Some(t) = forces {
        for (i, (s, t)) in spokes.iter().zip(t).enumerate() {
            if t.norm() > 0.0 && s.cross(*t).abs() <= tolerance() * s.norm() * t.norm() {
                return Err(Error::ParallelSpoke { vertex: i });
            }
        }
    }
    Ok(SpokeData { centre, spokes })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaBound {
    /// Largest ratio of the torque sums of `t` and `s` over the non-adjacent pairs.
    pub bound: f64,
    /// Value to use: the bound with margin, or a tiny positive floor.
    pub lambda: f64,
}

/// Smallest `lambda` for which `t - lambda s` passes the torque test, with margin.
///
/// The partial sums of the spoke loads are negative on every non-adjacent pair,
/// so each pair gives a lower bound `S_t / S_s`.
pub fn lambda_bound(f: &ForceMultiplet, spokes: &[Vec2]) -> LambdaBound {
    let st = partial_torque_sums(f.points(), f.forces());
    let ss = partial_torque_sums(f.points(), spokes);
    let smax = spokes.iter().map(|s| s.norm()).fold(0.0, f64::max);
    let tiny = 1e-14 * smax * f.diameter();
    let mut bound = f64::NEG_INFINITY;
    for (&(_, _, a), &(_, _, b)) in st.iter().zip(&ss) {
        if b < -tiny {
            bound = bound.max(a / b);
        }
    }
    let lambda = if bound > 0.0 {
        (1.0 + LAMBDA_MARGIN) * bound
    } else {
        1e-6 * f.max_force() / smax.max(f64::MIN_POSITIVE)
    };
    LambdaBound { bound, lambda }
}

/// Compressive structure carrying `lambda s_i` at `points`.
///
/// Built as the spoke web carrying `-lambda s_i` with its hub cleaved into a ring
/// of three-member junctions, then with every sign flipped. Ring nodes sit on the
/// spokes, no farther than `rho` times the shortest spoke from the hub.
pub fn build_ring_spoke(centre: Point2, points: &[Point2], lambda: f64, spokes: &[Vec2], rho: f64) -> Result<Web> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidInput(format!("lambda must be positive, got {lambda}")));
    }
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidInput(format!("ring fraction {rho} outside (0, 1)")));
    }
    let mut w = Web::new();
    for (&p, &s) in points.iter().zip(spokes) {
        let i = w.add_node(p, NodeKind::Boundary);
        w.nodes[i].load = s * lambda;
    }
    let hub = w.add_node(centre, NodeKind::Interior);
    for (i, &s) in spokes.iter().enumerate() {
        w.add_edge(i, hub, lambda * s.norm());
    }
    let mut w = if points.len() > 3 { cleave_with(&w, rho)? } else { w };
    for e in &mut w.edges {
        e.tension = -e.tension;
    }

    let diam = w.diameter();
    let ring = w.interior_indices();
    for (k, &a) in ring.iter().enumerate() {
        for &b in &ring[k + 1..] {
            if w.nodes[a].pos.dist(w.nodes[b].pos) <= tolerance() * diam {
                return Err(Error::RingInfeasible { rho });
            }
        }
    }
    let report = verify_equilibrium(&w)?;
    let scale = w.max_tension().max(w.max_load());
    if !report.in_equilibrium || w.edges.iter().any(|e| !(e.tension < -tolerance() * scale)) {
        return Err(Error::RingInfeasible { rho });
    }
    Ok(w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MemberRole {
    Compression,
    Tension,
    Stub,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MixedOptions {
    pub epsilon: Option<f64>,
    pub lambda: Option<f64>,
    pub weights: Option<Vec<f64>>,
    pub rho: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixedTruss {
    /// Signed member forces; boundary nodes are the input vertices in order.
    pub web: Web,
    /// Role of each edge of `web`.
    pub roles: Vec<MemberRole>,
    pub epsilon: f64,
    pub lambda: f64,
    pub rho: f64,
    pub weights: Vec<f64>,
    pub centre: Point2,
    /// Attachment points `x_i` of the two sub-structures.
    pub offsets: Vec<Point2>,
    /// Load carried by the wire web.
    pub tension_part: ForceMultiplet,
}

impl MixedTruss {
    pub fn members(&self, role: MemberRole) -> impl Iterator<Item = &crate::web::Edge> {
        self.web.edges.iter().zip(&self.roles).filter(move |(_, &r)| r == role).map(|(e, _)| e)
    }
}

/// Builds a truss of compression and tension members carrying `targets`.
pub fn build_mixed(targets: &ForceMultiplet, opts: &MixedOptions) -> Result<MixedTruss> {
    let n = targets.len();
    check_clockwise_convex(targets.points())?;
    let b = check_balance(targets);
    if !b.balanced {
        return Err(Error::NotBalanced { force: b.force_residual.norm(), torque: b.torque_residual });
    }
    let tmax = targets.max_force();
    if tmax == 0.0 {
        return Err(Error::InvalidInput("all target forces are zero".into()));
    }

    // pull each attachment point back against its force
    let poly = ConvexPolygon::new(targets.points().to_vec())?;
    let mut epsilon = match opts.epsilon {
        Some(e) if e > 0.0 => e,
        Some(e) => return Err(Error::InvalidInput(format!("epsilon must be positive, got {e}"))),
        None => 1e-2 * poly.inradius() / tmax,
    };
    let offset = |eps: f64| -> Vec<Point2> {
        targets.points().iter().zip(targets.forces()).map(|(&p, &t)| p - t * eps).collect()
    };
    let mut points = offset(epsilon);
    let mut halvings = 0;
    while check_clockwise_convex(&points).is_err() {
        halvings += 1;
        if halvings > 60 {
            return Err(Error::NotConvex { vertex: 0 });
        }
        epsilon *= 0.5;
        points = offset(epsilon);
    }
    let moved = ForceMultiplet::new(points.clone(), targets.forces().to_vec())?;

    let mut weights = match &opts.weights {
        Some(w) => w.clone(),
        None => vec![1.0 / n as f64; n],
    };
    let mut attempts = 0;
    let data = loop {
        match spoke_data(&points, &weights, Some(targets.forces())) {
            Ok(d) => break d,
            Err(Error::ParallelSpoke { vertex }) if attempts < 10 * n => {
                attempts += 1;
                // raising w_vertex itself only slides x0 along the bad spoke
                weights[(vertex + 1) % n] += 1e-3;
                let total: f64 = weights.iter().sum();
                weights.iter_mut().for_each(|w| *w /= total);
            }
            Err(e) => return Err(e),
        }
    };

    let lambda = match opts.lambda {
        Some(l) if l > 0.0 => l,
        Some(l) => return Err(Error::InvalidInput(format!("lambda must be positive, got {l}"))),
        None => lambda_bound(&moved, &data.spokes).lambda,
    };
    let rest: Vec<Vec2> = targets.forces().iter().zip(&data.spokes).map(|(&t, &s)| t - s * lambda).collect();
    let tension_part = moved.with_forces(rest)?;
    let cert = check_tension_feasible(&tension_part)?;
    if !cert.feasible {
        return Err(Error::Infeasible { residual: -cert.min_margin, nodes: vec![cert.min_pair.0, cert.min_pair.1] });
    }
    let tension_web = cleave(&envelope_web(&tension_part)?)?;

    let mut rho = opts.rho.unwrap_or(DEFAULT_RHO);
    let mut backoff = 0;
    let ring = loop {
        match build_ring_spoke(data.centre, &points, lambda, &data.spokes, rho) {
            Ok(w) => break w,
            Err(Error::RingInfeasible { .. }) if backoff < 20 => {
                backoff += 1;
                rho *= 0.5;
            }
            Err(e) => return Err(e),
        }
    };

    let joined = superimpose(&ring, &tension_web)?;
    let (web, roles) = attach_stubs(&joined, targets);
    let report = verify_equilibrium(&web)?;
    if !report.in_equilibrium {
        return Err(Error::InteriorImbalance { node: 0, residual: report.max_node_residual });
    }
    Ok(MixedTruss { web, roles, epsilon, lambda, rho, weights, centre: data.centre, offsets: points, tension_part })
}

/// Moves each load from `x_i` to the true vertex through a stub carrying it.
///
/// The first `n` nodes of `joined` are the attachment points in order.
fn attach_stubs(joined: &Web, targets: &ForceMultiplet) -> (Web, Vec<MemberRole>) {
    let n = targets.len();
    let mut out = Web::new();
    for (&p, &t) in targets.points().iter().zip(targets.forces()) {
        let i = out.add_node(p, NodeKind::Boundary);
        out.nodes[i].load = t;
    }
    let mut map = vec![0; joined.nodes.len()];
    for (i, node) in joined.nodes.iter().enumerate() {
        map[i] = if i < n && node.pos == targets.points()[i] {
            i
        } else {
            out.add_node(node.pos, NodeKind::Interior)
        };
    }
    let mut roles = Vec::new();
    for e in &joined.edges {
        out.add_edge(map[e.a], map[e.b], e.tension);
        roles.push(if e.tension < 0.0 { MemberRole::Compression } else { MemberRole::Tension });
    }
    for (i, &t) in targets.forces().iter().enumerate() {
        if map[i] != i {
            out.add_edge(i, map[i], t.norm());
            roles.push(MemberRole::Stub);
        }
    }
    (out, roles)
}
