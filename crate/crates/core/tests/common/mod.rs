//! Random instances shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tensionweb::airy::envelope_web;
use tensionweb::geom::{ConvexPolygon, Vec2};
use tensionweb::interior::InteriorProblem;
use tensionweb::statics::ForceMultiplet;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` points on a random ellipse, clockwise, no two closer in angle than 0.1.
pub fn convex_polygon(rng: &mut impl Rng, n: usize) -> Vec<Vec2> {
    let min_gap = 0.1_f64.min(PI / n as f64);
    let mut angles: Vec<f64> = loop {
        let mut a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
        a.sort_by(f64::total_cmp);
        let wrap = a[0] + 2.0 * PI - a[n - 1];
        if a.windows(2).all(|w| w[1] - w[0] > min_gap) && wrap > min_gap {
            break a;
        }
    };
    angles.reverse();
    let (ax, ay) = (rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0));
    let rot: f64 = rng.gen_range(0.0..PI);
    let c = Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    angles
        .iter()
        .map(|&t| {
            let (x, y) = (ax * t.cos(), ay * t.sin());
            c + Vec2::new(x * rot.cos() - y * rot.sin(), x * rot.sin() + y * rot.cos())
        })
        .collect()
}

/// Loads of straight wires between random pairs of vertices with random positive
/// tensions; feasible by construction.
pub fn chord_multiplet(rng: &mut impl Rng, pts: &[Vec2]) -> ForceMultiplet {
    let n = pts.len();
    let mut forces = vec![Vec2::ZERO; n];
    let mut any = false;
    while !any {
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_bool(0.4) {
                    let q = rng.gen_range(0.1..2.0);
                    let d = (pts[j] - pts[i]).normalized().unwrap();
                    forces[i] -= d * q;
                    forces[j] += d * q;
                    any = true;
                }
            }
        }
    }
    ForceMultiplet::new(pts.to_vec(), forces).unwrap()
}

/// Random forces projected onto the balanced subspace.
pub fn balanced_multiplet(rng: &mut impl Rng, pts: &[Vec2]) -> ForceMultiplet {
    let n = pts.len();
    let raw = DVector::from_fn(2 * n, |_, _| rng.gen_range(-1.0..1.0));
    let mut c = DMatrix::zeros(3, 2 * n);
    for (i, p) in pts.iter().enumerate() {
        c[(0, 2 * i)] = 1.0;
        c[(1, 2 * i + 1)] = 1.0;
        c[(2, 2 * i)] = -p.y;
        c[(2, 2 * i + 1)] = p.x;
    }
    let ct = c.transpose();
    let lambda = (&c * &ct).try_inverse().unwrap() * (&c * &raw);
    let f = &raw - &ct * lambda;
    ForceMultiplet::new(pts.to_vec(), (0..n).map(|i| Vec2::new(f[2 * i], f[2 * i + 1])).collect()).unwrap()
}

/// Random tension-feasible multiplet on a random convex `n`-gon.
pub fn feasible_multiplet(rng: &mut impl Rng, n: usize) -> ForceMultiplet {
    let pts = convex_polygon(rng, n);
    chord_multiplet(rng, &pts)
}

/// An interior-load problem made by cutting the first wire of a feasible web at
/// an interior point: the wire's vertex drops out and its load moves to the cut.
pub fn cut_wire_instance(rng: &mut impl Rng) -> (InteriorProblem, ForceMultiplet) {
    loop {
        let n = rng.gen_range(4..=8);
        let f = feasible_multiplet(rng, n);
        let w = envelope_web(&f).unwrap();
        let v = rng.gen_range(0..n);
        if f.forces()[v].norm() < 0.2 || w.degree(v) != 1 {
            continue;
        }
        let e = w.edges.iter().find(|e| e.a == v || e.b == v).unwrap();
        let other = if e.a == v { e.b } else { e.a };
        let y = f.points()[v].lerp(w.nodes[other].pos, rng.gen_range(0.2..0.8));
        let keep: Vec<usize> = (0..n).filter(|&i| i != v).collect();
        let hull = ForceMultiplet::new(
            keep.iter().map(|&i| f.points()[i]).collect(),
            keep.iter().map(|&i| f.forces()[i]).collect(),
        )
        .unwrap();
        let poly = ConvexPolygon::new(hull.points().to_vec()).unwrap();
        if poly.inside_margin(y) < 1e-3 * poly.diameter() {
            continue;
        }
        if let Ok(p) = InteriorProblem::new(hull, y, f.forces()[v]) {
            return (p, f);
        }
    }
}
