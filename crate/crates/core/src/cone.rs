//! Webs that carry a prescribed polyhedral cone of force multiplets, built by
//! superimposing one non-degenerate envelope web per generator.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::airy::envelope_web;
use crate::error::{Error, Result};
use crate::geom::{point_segment_distance, rotate90cw, tolerance, Vec2};
use crate::nnls;
use crate::statics::{check_tension_feasible, ForceMultiplet};
use crate::web::{superimpose, verify_equilibrium, NodeKind, Web};

/// Relative size of the perturbation applied to generators after a collision.
pub const PERTURBATION: f64 = 1e-6;
pub const MAX_RETRIES: usize = 8;
const SEED: u64 = 0x7e51_0a5e;

/// Ring size used by [`cleave`], relative to the shortest wire at the junction.
pub const CLEAVE_FRACTION: f64 = 1e-3;

/// Replaces every interior junction where more than three wires meet by a small
/// ring of three-wire junctions.
///
/// Locally the stress function is `min_k g_k . y` around the junction; a plane
/// whose gradient is the centroid of the `g_k`, lowered slightly, cuts off the
/// apex. The new ring lies within `CLEAVE_FRACTION` of the shortest incident wire.
pub fn cleave(w: &Web) -> Result<Web> {
    cleave_with(w, CLEAVE_FRACTION)
}

/// [`cleave`] with the ring size as a fraction of the shortest incident wire.
pub fn cleave_with(w: &Web, fraction: f64) -> Result<Web> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidInput(format!("cleave fraction {fraction} outside (0, 1)")));
    }
    let mut out = w.clone();
    // removing a node shifts later indices, so work from the back
    let targets: Vec<usize> =
        (0..w.nodes.len()).filter(|&v| w.nodes[v].kind == NodeKind::Interior && w.degree(v) > 3).collect();
    for &v in targets.iter().rev() {
        cleave_node(&mut out, v, fraction);
    }
    Ok(out)
}

fn cleave_node(w: &mut Web, v: usize, fraction: f64) {
    let centre = w.nodes[v].pos;
    let mut spokes: Vec<(usize, Vec2, f64, f64)> = w
        .edges
        .iter()
        .enumerate()
        .filter(|(_, e)| e.a == v || e.b == v)
        .map(|(k, e)| {
            let other = if e.a == v { e.b } else { e.a };
            let d = w.nodes[other].pos - centre;
            (k, d * (1.0 / d.norm()), e.tension, d.norm())
        })
        .collect();
    spokes.sort_by(|a, b| a.1.y.atan2(a.1.x).total_cmp(&b.1.y.atan2(b.1.x)));
    let d = spokes.len();

    // gradients of the sectors, sector k lying just before spoke k
    let mut g = vec![Vec2::ZERO; d];
    for k in 1..d {
        g[k] = g[k - 1] + rotate90cw(spokes[k - 1].1) * spokes[k - 1].2;
    }
    let gq = g.iter().copied().sum::<Vec2>() * (1.0 / d as f64);
    let den: Vec<f64> = (0..d).map(|k| (gq - g[k]).dot(spokes[k].1)).collect();
    let delta = fraction * spokes.iter().map(|s| s.3).fold(f64::INFINITY, f64::min);
    let eta = delta * den.iter().copied().fold(f64::INFINITY, f64::min);

    let ring: Vec<usize> = (0..d)
        .map(|k| w.add_node(centre + spokes[k].1 * (eta / den[k]), NodeKind::Interior))
        .collect();
    for k in 0..d {
        let e = &mut w.edges[spokes[k].0];
        if e.a == v {
            e.a = ring[k];
        } else {
            e.b = ring[k];
        }
    }
    for k in 0..d {
        let next = (k + 1) % d;
        w.add_edge(ring[k], ring[next], (g[next] - gq).norm());
    }
    w.nodes.remove(v);
    for e in &mut w.edges {
        if e.a > v {
            e.a -= 1;
        }
        if e.b > v {
            e.b -= 1;
        }
    }
}

/// Cleaves the web of `f` and checks that it still carries `f`.
pub fn cleave_degenerate(w: &Web, f: &ForceMultiplet) -> Result<Web> {
    let mut base = w.clone();
    base.attach_loads(f)?;
    let out = cleave(&base)?;
    let r = verify_equilibrium(&out)?;
    if !r.in_equilibrium {
        let node = r.residuals.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).unwrap().0;
        return Err(Error::InteriorImbalance { node, residual: r.max_node_residual });
    }
    Ok(out)
}

/// Generators of a polyhedral cone of multiplets acting at shared points.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceCone {
    generators: Vec<ForceMultiplet>,
}

impl ForceCone {
    pub fn new(generators: Vec<ForceMultiplet>) -> Result<Self> {
        let Some(first) = generators.first() else {
            return Err(Error::InvalidInput("a cone needs at least one generator".into()));
        };
        let tol = tolerance() * first.diameter();
        for (k, g) in generators.iter().enumerate() {
            if g.len() != first.len() || g.points().iter().zip(first.points()).any(|(p, q)| p.dist(*q) > tol) {
                return Err(Error::InvalidInput(format!("generator {} acts at different points", k + 1)));
            }
            let c = check_tension_feasible(g)?;
            if let Some((j, i)) = c.violating_pair {
                return Err(Error::InvalidInput(format!(
                    "generator {} fails the torque test at pair ({j}, {i})",
                    k + 1
                )));
            }
        }
        Ok(ForceCone { generators })
    }

    pub fn generators(&self) -> &[ForceMultiplet] {
        &self.generators
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConeWeb {
    pub web: Web,
    /// Generators actually realised: the inputs, or a slight perturbation of them
    /// when the first attempt produced overlapping wires or junctions.
    pub generators: Vec<ForceMultiplet>,
    pub attempts: usize,
}

fn check_junction_clash(w1: &Web, w2: &Web) -> Result<()> {
    let tol = tolerance() * w1.diameter().max(w2.diameter());
    for (a, b) in [(w1, w2), (w2, w1)] {
        for n in a.nodes.iter().filter(|n| n.kind == NodeKind::Interior) {
            if b.nodes.iter().any(|m| m.pos.dist(n.pos) <= tol) {
                return Err(Error::CoincidentJunction);
            }
            for e in &b.edges {
                if point_segment_distance(n.pos, b.nodes[e.a].pos, b.nodes[e.b].pos).0 <= tol {
                    return Err(Error::CoincidentJunction);
                }
            }
        }
    }
    Ok(())
}

fn assemble(gens: &[ForceMultiplet]) -> Result<Web> {
    let mut acc: Option<Web> = None;
    for g in gens {
        let w = cleave_degenerate(&envelope_web(g)?, g)?;
        acc = Some(match acc {
            None => w,
            Some(prev) => {
                check_junction_clash(&prev, &w)?;
                superimpose(&prev, &w)?
            }
        });
    }
    Ok(acc.expect("cone has a generator"))
}

/// Random balanced perturbation of the nonzero forces of `f`, of relative size `PERTURBATION`.
fn perturb(f: &ForceMultiplet, rng: &mut ChaCha8Rng) -> Result<ForceMultiplet> {
    let scale = f.max_force();
    let support: Vec<usize> = (0..f.len()).filter(|&i| f.forces()[i].norm() > tolerance() * scale).collect();
    let m = 2 * support.len();
    let mut c = DMatrix::zeros(3, m);
    for (k, &i) in support.iter().enumerate() {
        let x = f.points()[i];
        c[(0, 2 * k)] = 1.0;
        c[(1, 2 * k + 1)] = 1.0;
        c[(2, 2 * k)] = -x.y;
        c[(2, 2 * k + 1)] = x.x;
    }
    let raw = DVector::from_fn(m, |_, _| rng.gen_range(-1.0..1.0) * PERTURBATION * scale);
    let pinv = c.clone().pseudo_inverse(1e-12).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let delta = &raw - &pinv * (&c * &raw);
    let mut forces = f.forces().to_vec();
    for (k, &i) in support.iter().enumerate() {
        forces[i] += Vec2::new(delta[2 * k], delta[2 * k + 1]);
    }
    f.with_forces(forces)
}

/// Superposition of the cleaved envelope webs of all generators.
///
/// Overlapping wires or coinciding junctions are avoided by retrying with
/// slightly perturbed (still balanced, still feasible) generators.
pub fn build_cone_web(cone: &ForceCone) -> Result<ConeWeb> {
    let mut gens = cone.generators.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut last = Error::CoincidentSegment;
    for attempt in 0..=MAX_RETRIES {
        match assemble(&gens) {
            Ok(web) => return Ok(ConeWeb { web, generators: gens, attempts: attempt + 1 }),
            Err(e @ (Error::CoincidentSegment | Error::CoincidentJunction)) => last = e,
            Err(e) => return Err(e),
        }
        gens = cone
            .generators
            .iter()
            .map(|g| {
                for _ in 0..16 {
                    if let Ok(p) = perturb(g, &mut rng) {
                        if check_tension_feasible(&p).map(|c| c.feasible).unwrap_or(false) {
                            return p;
                        }
                    }
                }
                g.clone()
            })
            .collect();
    }
    Err(last)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConeMembership {
    pub contained: bool,
    pub coefficients: Vec<f64>,
    pub residual: f64,
}

/// Nonnegative coefficients expressing `f` in terms of the generators, if any.
pub fn cone_contains(cone: &ForceCone, f: &ForceMultiplet) -> Result<ConeMembership> {
    let gens = &cone.generators;
    if f.len() != gens[0].len() {
        return Err(Error::InvalidInput("multiplet length differs from the cone's".into()));
    }
    let rows = 2 * f.len();
    let a = DMatrix::from_fn(rows, gens.len(), |r, c| {
        let t = gens[c].forces()[r / 2];
        if r % 2 == 0 { t.x } else { t.y }
    });
    let b = DVector::from_fn(rows, |r, _| {
        let t = f.forces()[r / 2];
        if r % 2 == 0 { t.x } else { t.y }
    });
    let x = nnls::nnls(&a, &b);
    let residual = (&a * &x - &b).amax();
    let scale = f.max_force().max(gens.iter().map(|g| g.max_force()).fold(0.0, f64::max));
    Ok(ConeMembership {
        contained: residual <= tolerance() * scale.max(f64::MIN_POSITIVE),
        coefficients: x.iter().copied().collect(),
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;
    use crate::web::{boundary_forces, solve_tensions};

    fn interior_degrees(w: &Web) -> Vec<usize> {
        w.interior_indices().into_iter().map(|i| w.degree(i)).collect()
    }

    fn star(centre: Vec2) -> ForceMultiplet {
        samples::square_star(centre).unwrap()
    }

    #[test]
    fn square_junction_becomes_ring_of_four() {
        let f = samples::square_radial();
        let w = cleave_degenerate(&envelope_web(&f).unwrap(), &f).unwrap();
        assert_eq!(interior_degrees(&w), vec![3; 4]);
        assert_eq!(w.edges.len(), 8);
        for n in w.interior_indices() {
            assert!(w.nodes[n].pos.norm() <= 1e-3 * 2f64.sqrt());
        }
        let back = boundary_forces(&w).unwrap();
        for (a, b) in back.forces().iter().zip(f.forces()) {
            assert!(a.dist(*b) < 1e-12);
        }
    }

    #[test]
    fn decagon_junction_becomes_ring_of_ten() {
        let f = samples::regular_polygon_radial(10, 1.0);
        let w = cleave_degenerate(&envelope_web(&f).unwrap(), &f).unwrap();
        assert_eq!(interior_degrees(&w), vec![3; 10]);
        assert!(verify_equilibrium(&w).unwrap().in_equilibrium);
    }

    #[test]
    fn degree_three_web_is_unchanged() {
        let f = samples::regular_polygon_radial(3, 1.0);
        let w = envelope_web(&f).unwrap();
        assert_eq!(cleave_degenerate(&w, &f).unwrap(), w);
    }

    #[test]
    fn cleaved_square_supports_a_single_ray() {
        let f = samples::square_radial();
        let w = cleave_degenerate(&envelope_web(&f).unwrap(), &f).unwrap();
        let q = solve_tensions(&w, &f.scaled(2.0)).unwrap();
        for (a, b) in q.iter().zip(&w.edges) {
            assert!((a - 2.0 * b.tension).abs() < 1e-9);
        }
        // the uncleaved spokes carry any radial pattern with t1 = -t3, t2 = -t4
        let mut t = f.forces().to_vec();
        t[0] = t[0] * 2.0;
        t[2] = t[2] * 2.0;
        let g = f.with_forces(t).unwrap();
        assert!(solve_tensions(&envelope_web(&f).unwrap(), &g).is_ok());
        assert!(solve_tensions(&w, &g).is_err());
    }

    #[test]
    fn single_generator_cone() {
        let f = star(Vec2::new(0.2, -0.1));
        let cone = ForceCone::new(vec![f.clone()]).unwrap();
        let built = build_cone_web(&cone).unwrap();
        assert_eq!(built.attempts, 1);
        assert_eq!(interior_degrees(&built.web), vec![3; 4]);
    }

    #[test]
    fn two_star_cone() {
        let (f1, f2) = (star(Vec2::new(0.3, 0.2)), star(Vec2::new(-0.25, -0.3)));
        let cone = ForceCone::new(vec![f1.clone(), f2.clone()]).unwrap();
        let built = build_cone_web(&cone).unwrap();
        assert_eq!(built.attempts, 1);
        for (a, b) in [(1.0, 0.0), (0.0, 1.0), (0.5, 2.0)] {
            let g = f1.combine(a, &f2, b).unwrap();
            assert!(solve_tensions(&built.web, &g).is_ok());
        }
        let probe = f1.combine(1.0, &f2, -0.5).unwrap();
        assert!(solve_tensions(&built.web, &probe).is_err());
    }

    #[test]
    fn overlapping_generators_are_perturbed() {
        // both generators pull vertex 1 along the same diagonal
        let f1 = samples::square_radial();
        let f2 = samples::inward_diagonal().scaled(-1.0);
        let cone = ForceCone::new(vec![f1, f2]).unwrap();
        let built = build_cone_web(&cone).unwrap();
        assert!(built.attempts > 1);
        for g in &built.generators {
            assert!(check_tension_feasible(g).unwrap().feasible);
            assert!(solve_tensions(&built.web, g).is_ok());
        }
    }

    #[test]
    fn membership() {
        let (f1, f2) = (star(Vec2::new(0.3, 0.2)), star(Vec2::new(-0.25, -0.3)));
        let cone = ForceCone::new(vec![f1.clone(), f2.clone()]).unwrap();
        let m = cone_contains(&cone, &f1).unwrap();
        assert!(m.contained);
        assert!((m.coefficients[0] - 1.0).abs() < 1e-12 && m.coefficients[1].abs() < 1e-12);
        let m = cone_contains(&cone, &f1.combine(2.0, &f2, 3.0).unwrap()).unwrap();
        assert!(m.contained);
        assert!((m.coefficients[0] - 2.0).abs() < 1e-10 && (m.coefficients[1] - 3.0).abs() < 1e-10);
        let one = ForceCone::new(vec![f1.clone()]).unwrap();
        assert!(!cone_contains(&one, &f1.scaled(-1.0)).unwrap().contained);
    }

    #[test]
    fn infeasible_generator_rejected() {
        assert!(ForceCone::new(vec![samples::inward_diagonal()]).is_err());
    }
}
