//! Wire webs: straight members between nodes, each carrying a scalar tension.
//!
//! Positive tension pulls the two end nodes towards each other; negative values
//! are compression. Terminal nodes ([`NodeKind::Boundary`]) may carry an external
//! load, interior nodes never do.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geom::{self, point_segment_distance, segment_intersection, tolerance, Point2, Vec2};
use crate::nnls;
use crate::statics::ForceMultiplet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Boundary,
    Interior,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub pos: Point2,
    pub kind: NodeKind,
    pub load: Vec2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub tension: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Web {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

impl Web {
    pub fn new() -> Self {
        Web::default()
    }

    /// Web with one boundary node per multiplet point, carrying its force.
    pub fn with_boundary(f: &ForceMultiplet) -> Self {
        let nodes = f
            .points()
            .iter()
            .zip(f.forces())
            .map(|(&pos, &load)| Node { pos, kind: NodeKind::Boundary, load })
            .collect();
        Web { nodes, edges: Vec::new() }
    }

    pub fn add_node(&mut self, pos: Point2, kind: NodeKind) -> usize {
        self.nodes.push(Node { pos, kind, load: Vec2::ZERO });
        self.nodes.len() - 1
    }

    pub fn add_edge(&mut self, a: usize, b: usize, tension: f64) -> usize {
        self.edges.push(Edge { a, b, tension });
        self.edges.len() - 1
    }

    pub fn boundary_indices(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].kind == NodeKind::Boundary).collect()
    }

    pub fn interior_indices(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].kind == NodeKind::Interior).collect()
    }

    pub fn degree(&self, node: usize) -> usize {
        self.edges.iter().filter(|e| e.a == node || e.b == node).count()
    }

    pub fn edge_length(&self, e: &Edge) -> f64 {
        self.nodes[e.a].pos.dist(self.nodes[e.b].pos)
    }

    pub fn diameter(&self) -> f64 {
        let pts: Vec<Point2> = self.nodes.iter().map(|n| n.pos).collect();
        geom::diameter(&pts)
    }

    pub fn max_tension(&self) -> f64 {
        self.edges.iter().map(|e| e.tension.abs()).fold(0.0, f64::max)
    }

    pub fn max_load(&self) -> f64 {
        self.nodes.iter().map(|n| n.load.norm()).fold(0.0, f64::max)
    }

    /// Replaces boundary loads with `f`, matching boundary nodes to multiplet points in order.
    pub fn attach_loads(&mut self, f: &ForceMultiplet) -> Result<()> {
        let b = self.boundary_indices();
        if b.len() != f.len() {
            return Err(Error::InvalidInput(format!(
                "web has {} boundary nodes, multiplet has {} points",
                b.len(),
                f.len()
            )));
        }
        let tol = tolerance() * self.diameter().max(f.diameter());
        for (k, &i) in b.iter().enumerate() {
            if self.nodes[i].pos.dist(f.points()[k]) > tol {
                return Err(Error::InvalidInput(format!("boundary node {} is not at point {}", i, k + 1)));
            }
            self.nodes[i].load = f.forces()[k];
        }
        Ok(())
    }

    /// Boundary nodes first in their current order, then interior nodes sorted
    /// lexicographically. Interior nodes without edges are dropped.
    pub fn canonicalize(&self) -> Web {
        let mut interior: Vec<usize> =
            self.interior_indices().into_iter().filter(|&i| self.degree(i) > 0).collect();
        interior.sort_by(|&i, &j| {
            let (p, q) = (self.nodes[i].pos, self.nodes[j].pos);
            p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y))
        });
        let order: Vec<usize> = self.boundary_indices().into_iter().chain(interior).collect();
        let mut map = vec![usize::MAX; self.nodes.len()];
        for (new, &old) in order.iter().enumerate() {
            map[old] = new;
        }
        Web {
            nodes: order.iter().map(|&i| self.nodes[i]).collect(),
            edges: self
                .edges
                .iter()
                .map(|e| Edge { a: map[e.a], b: map[e.b], tension: e.tension })
                .collect(),
        }
    }

    /// Unit vectors of each edge, pointing from `a` to `b`.
    fn directions(&self) -> Result<Vec<Vec2>> {
        let scale = self.diameter().max(f64::MIN_POSITIVE);
        self.edges
            .iter()
            .enumerate()
            .map(|(k, e)| {
                let d = self.nodes[e.b].pos - self.nodes[e.a].pos;
                if e.a == e.b || d.norm() <= 1e-14 * scale {
                    Err(Error::ZeroLengthEdge { edge: k })
                } else {
                    Ok(d * (1.0 / d.norm()))
                }
            })
            .collect()
    }

    /// Sum of member pulls on each node (loads excluded).
    fn member_pulls(&self) -> Result<Vec<Vec2>> {
        let dirs = self.directions()?;
        let mut pull = vec![Vec2::ZERO; self.nodes.len()];
        for (e, d) in self.edges.iter().zip(dirs) {
            pull[e.a] += d * e.tension;
            pull[e.b] -= d * e.tension;
        }
        Ok(pull)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumReport {
    pub max_node_residual: f64,
    pub residuals: Vec<Vec2>,
    pub in_equilibrium: bool,
    /// Every member strictly in tension.
    pub all_tensile: bool,
}

pub fn verify_equilibrium(w: &Web) -> Result<EquilibriumReport> {
    let pulls = w.member_pulls()?;
    let residuals: Vec<Vec2> = pulls.iter().zip(&w.nodes).map(|(&p, n)| p + n.load).collect();
    let max_node_residual = residuals.iter().map(|r| r.norm()).fold(0.0, f64::max);
    let scale = w.max_tension() + w.max_load();
    Ok(EquilibriumReport {
        in_equilibrium: max_node_residual <= tolerance() * scale,
        all_tensile: w.edges.iter().all(|e| e.tension > 0.0),
        max_node_residual,
        residuals,
    })
}

/// Loads the boundary nodes must carry to balance the members.
pub fn boundary_forces(w: &Web) -> Result<ForceMultiplet> {
    let pulls = w.member_pulls()?;
    let scale = w.max_tension().max(f64::MIN_POSITIVE);
    for i in w.interior_indices() {
        let r = pulls[i].norm();
        if r > tolerance() * scale {
            return Err(Error::InteriorImbalance { node: i, residual: r });
        }
    }
    let b = w.boundary_indices();
    ForceMultiplet::new(b.iter().map(|&i| w.nodes[i].pos).collect(), b.iter().map(|&i| -pulls[i]).collect())
}

/// Equilibrium matrix: two rows per node, one column per edge.
pub(crate) fn equilibrium_matrix(w: &Web) -> Result<DMatrix<f64>> {
    let dirs = w.directions()?;
    let mut a = DMatrix::zeros(2 * w.nodes.len(), w.edges.len());
    for (k, (e, d)) in w.edges.iter().zip(dirs).enumerate() {
        a[(2 * e.a, k)] += d.x;
        a[(2 * e.a + 1, k)] += d.y;
        a[(2 * e.b, k)] -= d.x;
        a[(2 * e.b + 1, k)] -= d.y;
    }
    Ok(a)
}

/// Finds nonnegative tensions that put the web in equilibrium with `target`
/// applied at its boundary nodes (matched in order).
pub fn solve_tensions(geometry: &Web, target: &ForceMultiplet) -> Result<Vec<f64>> {
    let mut w = geometry.clone();
    w.attach_loads(target)?;
    let a = equilibrium_matrix(&w)?;
    let b = DVector::from_iterator(2 * w.nodes.len(), w.nodes.iter().flat_map(|n| [-n.load.x, -n.load.y]));
    let q = nnls::nnls(&a, &b);
    let scale = target.max_force().max(q.amax()).max(f64::MIN_POSITIVE);
    let mut tensions: Vec<f64> = q.iter().map(|&v| if v < 1e-12 * scale { 0.0 } else { v }).collect();
    let qv = DVector::from_vec(tensions.clone());
    let r = &a * &qv - &b;
    let node_res: Vec<f64> = (0..w.nodes.len()).map(|i| r[2 * i].hypot(r[2 * i + 1])).collect();
    let worst = node_res.iter().copied().fold(0.0, f64::max);
    if worst > tolerance() * scale {
        let nodes = (0..w.nodes.len()).filter(|&i| node_res[i] > tolerance() * scale).collect();
        return Err(Error::Infeasible { residual: worst, nodes });
    }
    tensions.iter_mut().for_each(|t| *t = t.max(0.0));
    Ok(tensions)
}

/// Dimension of the space of self-stresses plus boundary-free states: the null
/// space of the interior-node equilibrium rows.
pub fn interior_stress_nullity(w: &Web) -> Result<usize> {
    let a = equilibrium_matrix(w)?;
    let rows: Vec<usize> = w.interior_indices().iter().flat_map(|&i| [2 * i, 2 * i + 1]).collect();
    let sub = DMatrix::from_fn(rows.len(), a.ncols(), |r, c| a[(rows[r], c)]);
    Ok(nnls::nullity(&sub, 1e-10))
}

pub fn total_length(w: &Web) -> f64 {
    w.edges.iter().map(|e| w.edge_length(e)).sum()
}

/// Both sides of the virtual-work identity: `(sum load . position, sum tension * length)`.
pub fn virtual_work(w: &Web) -> (f64, f64) {
    let loads = w.nodes.iter().map(|n| n.load.dot(n.pos)).sum();
    let members = w.edges.iter().map(|e| e.tension * w.edge_length(e)).sum();
    (loads, members)
}

fn find_or_add(nodes: &mut Vec<Node>, pos: Point2, tol: f64) -> usize {
    if let Some(i) = nodes.iter().position(|n| n.pos.dist(pos) <= tol) {
        return i;
    }
    nodes.push(Node { pos, kind: NodeKind::Interior, load: Vec2::ZERO });
    nodes.len() - 1
}

/// Union of two webs. Coincident nodes merge (loads add), proper crossings and
/// nodes lying on another wire become junctions that split the wires, each piece
/// keeping its tension.
pub fn superimpose(w1: &Web, w2: &Web) -> Result<Web> {
    let all: Vec<Point2> = w1.nodes.iter().chain(&w2.nodes).map(|n| n.pos).collect();
    let diam = geom::diameter(&all).max(f64::MIN_POSITIVE);
    let tol = tolerance() * diam;

    let mut nodes = w1.nodes.clone();
    let mut map2 = Vec::with_capacity(w2.nodes.len());
    for n in &w2.nodes {
        match nodes.iter().position(|m| m.pos.dist(n.pos) <= tol) {
            Some(i) => {
                if n.kind == NodeKind::Boundary {
                    nodes[i].kind = NodeKind::Boundary;
                }
                nodes[i].load += n.load;
                map2.push(i);
            }
            None => {
                nodes.push(*n);
                map2.push(nodes.len() - 1);
            }
        }
    }
    let mut edges: Vec<Edge> = w1.edges.clone();
    edges.extend(w2.edges.iter().map(|e| Edge { a: map2[e.a], b: map2[e.b], tension: e.tension }));
    edges.retain(|e| e.a != e.b);

    let seg = |nodes: &[Node], e: &Edge| (nodes[e.a].pos, nodes[e.b].pos);
    let mut splits: Vec<Vec<usize>> = vec![Vec::new(); edges.len()];
    for i in 0..edges.len() {
        for j in i + 1..edges.len() {
            let (ei, ej) = (edges[i], edges[j]);
            let shared = [ei.a, ei.b].into_iter().find(|&v| v == ej.a || v == ej.b);
            if let Some(v) = shared {
                let oi = if ei.a == v { ei.b } else { ei.a };
                let oj = if ej.a == v { ej.b } else { ej.a };
                if oi == oj {
                    return Err(Error::CoincidentSegment);
                }
                let p = nodes[v].pos;
                let (di, dj) = (nodes[oi].pos - p, nodes[oj].pos - p);
                if di.dot(dj) > 0.0 && (di.cross(dj) / (di.norm() * dj.norm())).abs() <= tolerance() {
                    return Err(Error::CoincidentSegment);
                }
                continue;
            }
            match segment_intersection(seg(&nodes, &ei), seg(&nodes, &ej)) {
                Err(_) => return Err(Error::CoincidentSegment),
                Ok(Some(x)) => {
                    let k = find_or_add(&mut nodes, x, tol);
                    splits[i].push(k);
                    splits[j].push(k);
                }
                Ok(None) => {}
            }
        }
    }
    for (k, e) in edges.iter().enumerate() {
        let (a, b) = seg(&nodes, e);
        for (v, n) in nodes.iter().enumerate() {
            if v == e.a || v == e.b || splits[k].contains(&v) {
                continue;
            }
            let (d, t) = point_segment_distance(n.pos, a, b);
            if d <= tol && t > 0.0 && t < 1.0 {
                splits[k].push(v);
            }
        }
    }
    let mut out = Vec::new();
    for (k, e) in edges.iter().enumerate() {
        let (a, b) = seg(&nodes, e);
        let dir = b - a;
        let mut chain: Vec<(f64, usize)> = splits[k].iter().map(|&v| ((nodes[v].pos - a).dot(dir), v)).collect();
        chain.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut prev = e.a;
        for (_, v) in chain.into_iter().chain(std::iter::once((0.0, e.b))) {
            if v != prev {
                out.push(Edge { a: prev, b: v, tension: e.tension });
                prev = v;
            }
        }
    }
    Ok(Web { nodes, edges: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    fn square_spokes(tension: f64) -> Web {
        let mut w = Web::with_boundary(&samples::square_radial());
        let c = w.add_node(Vec2::ZERO, NodeKind::Interior);
        for i in 0..4 {
            w.add_edge(i, c, tension);
        }
        w
    }

    fn decagon_ring() -> Web {
        let f = samples::regular_polygon_radial(10, 1.0);
        let mut w = Web::with_boundary(&f);
        let t = 1.0 / (2.0 * (std::f64::consts::PI / 10.0).sin());
        for i in 0..10 {
            w.add_edge(i, (i + 1) % 10, t);
        }
        w
    }

    #[test]
    fn square_spokes_balance() {
        let r = verify_equilibrium(&square_spokes(1.0)).unwrap();
        assert!(r.in_equilibrium && r.all_tensile);
        assert!(r.max_node_residual < 1e-15);
    }

    #[test]
    fn perturbed_tension_leaves_residual_at_center() {
        let mut w = square_spokes(1.0);
        w.edges[0].tension = 2.0;
        let r = verify_equilibrium(&w).unwrap();
        assert!(!r.in_equilibrium);
        assert!((r.residuals[4].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn decagon_ring_balances() {
        let w = decagon_ring();
        assert!(verify_equilibrium(&w).unwrap().in_equilibrium);
        let expect = 20.0 * (std::f64::consts::PI / 10.0).sin();
        assert!((total_length(&w) - expect).abs() < 1e-12);
        assert!((expect - 6.180339887498949).abs() < 1e-12);
    }

    #[test]
    fn zero_length_edge_is_error() {
        let mut w = square_spokes(1.0);
        w.add_edge(0, 0, 1.0);
        assert_eq!(verify_equilibrium(&w), Err(Error::ZeroLengthEdge { edge: 4 }));
    }

    #[test]
    fn boundary_forces_of_spokes() {
        let f = boundary_forces(&square_spokes(1.0)).unwrap();
        let expect = samples::square_radial();
        for (a, b) in f.forces().iter().zip(expect.forces()) {
            assert!(a.dist(*b) < 1e-15);
        }
    }

    #[test]
    fn boundary_forces_of_isolated_nodes_are_zero() {
        let w = Web::with_boundary(&samples::square_radial());
        assert!(boundary_forces(&w).unwrap().forces().iter().all(|t| *t == Vec2::ZERO));
    }

    #[test]
    fn boundary_forces_reject_interior_imbalance() {
        let mut w = square_spokes(1.0);
        w.edges[1].tension = 3.0;
        assert!(matches!(boundary_forces(&w), Err(Error::InteriorImbalance { node: 4, .. })));
    }

    #[test]
    fn solve_square_spokes() {
        let q = solve_tensions(&square_spokes(0.0), &samples::square_radial()).unwrap();
        for t in q {
            assert!((t - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn solve_rejects_asymmetric_target() {
        let f = samples::square_radial();
        let mut t = f.forces().to_vec();
        t[0] = t[0] * 2.0;
        let g = f.with_forces(t).unwrap();
        assert!(matches!(solve_tensions(&square_spokes(0.0), &g), Err(Error::Infeasible { .. })));
    }

    #[test]
    fn superimpose_with_empty_is_identity() {
        let w = square_spokes(1.0);
        let s = superimpose(&w, &Web::with_boundary(&samples::square_radial().scaled(0.0))).unwrap();
        assert_eq!(s.edges.len(), 4);
        assert_eq!(s.nodes.len(), 5);
        assert!(verify_equilibrium(&s).unwrap().in_equilibrium);
    }

    #[test]
    fn crossing_diagonals_are_joined() {
        let zero = samples::square_radial().scaled(0.0);
        let mut w1 = Web::with_boundary(&zero);
        w1.add_edge(0, 2, 1.0);
        let mut w2 = Web::with_boundary(&zero);
        w2.add_edge(1, 3, 1.0);
        let s = superimpose(&w1, &w2).unwrap();
        assert_eq!(s.nodes.len(), 5);
        assert_eq!(s.edges.len(), 4);
        assert_eq!(s.degree(4), 4);
        assert!(s.nodes[4].pos.norm() < 1e-15);
    }

    #[test]
    fn overlapping_wires_are_rejected() {
        let zero = samples::square_radial().scaled(0.0);
        let mut w1 = Web::with_boundary(&zero);
        w1.add_edge(0, 2, 1.0);
        let mut w2 = Web::with_boundary(&zero);
        let c = w2.add_node(Vec2::new(0.5, -0.5), NodeKind::Interior);
        w2.add_edge(0, c, 1.0);
        assert_eq!(superimpose(&w1, &w2), Err(Error::CoincidentSegment));
    }

    #[test]
    fn virtual_work_of_spokes() {
        let mut w = square_spokes(1.0);
        w.attach_loads(&samples::square_radial()).unwrap();
        let (l, m) = virtual_work(&w);
        assert!((l - 4.0 * std::f64::consts::SQRT_2).abs() < 1e-12);
        assert!((m - total_length(&w)).abs() < 1e-12);
    }

    #[test]
    fn degree_three_junction_has_single_ray() {
        let zero = samples::regular_polygon_radial(3, 1.0).scaled(0.0);
        let mut w = Web::with_boundary(&zero);
        let c = w.add_node(Vec2::ZERO, NodeKind::Interior);
        for i in 0..3 {
            w.add_edge(i, c, 1.0);
        }
        assert_eq!(interior_stress_nullity(&w).unwrap(), 1);
        assert_eq!(interior_stress_nullity(&square_spokes(1.0)).unwrap(), 2);
    }
}
