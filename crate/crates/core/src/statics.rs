//! Force multiplets, balance checks and the torque test for tension-only support
//! at the vertices of a convex polygon.

use crate::error::{Error, Result};
use crate::geom::{self, rotate90cw, tolerance, Point2, Vec2};

/// Forces applied at an ordered list of points.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceMultiplet {
    points: Vec<Point2>,
    forces: Vec<Vec2>,
}

impl ForceMultiplet {
    pub fn new(points: Vec<Point2>, forces: Vec<Vec2>) -> Result<Self> {
        if points.len() != forces.len() {
            return Err(Error::InvalidInput(format!(
                "{} points but {} forces",
                points.len(),
                forces.len()
            )));
        }
        if points.len() < 3 {
            return Err(Error::InvalidInput(format!("need at least 3 points, got {}", points.len())));
        }
        if points.iter().chain(&forces).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite value".into()));
        }
        Ok(ForceMultiplet { points, forces })
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn forces(&self) -> &[Vec2] {
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
        geom::diameter(&self.points)
    }

    /// Torque scale `max|t| * diameter`.
    pub fn torque_scale(&self) -> f64 {
        self.max_force() * self.diameter()
    }

    pub fn scaled(&self, alpha: f64) -> ForceMultiplet {
        ForceMultiplet {
            points: self.points.clone(),
            forces: self.forces.iter().map(|&t| t * alpha).collect(),
        }
    }

    /// Same points, forces replaced.
    pub fn with_forces(&self, forces: Vec<Vec2>) -> Result<ForceMultiplet> {
        ForceMultiplet::new(self.points.clone(), forces)
    }

    /// `alpha * self + beta * other`; points must coincide.
    pub fn combine(&self, alpha: f64, other: &ForceMultiplet, beta: f64) -> Result<ForceMultiplet> {
        if self.len() != other.len() {
            return Err(Error::InvalidInput("multiplets have different lengths".into()));
        }
        let tol = tolerance() * self.diameter().max(other.diameter());
        if self.points.iter().zip(&other.points).any(|(p, q)| p.dist(*q) > tol) {
            return Err(Error::InvalidInput("multiplets act at different points".into()));
        }
        let forces = self.forces.iter().zip(&other.forces).map(|(&a, &b)| a * alpha + b * beta).collect();
        ForceMultiplet::new(self.points.clone(), forces)
    }

    /// Renumbers so that vertex `start` comes first.
    pub fn rotated_labels(&self, start: usize) -> ForceMultiplet {
        let n = self.len();
        ForceMultiplet {
            points: (0..n).map(|i| self.points[(i + start) % n]).collect(),
            forces: (0..n).map(|i| self.forces[(i + start) % n]).collect(),
        }
    }

    /// Applies a rigid rotation by `angle` radians about the origin to points and forces.
    pub fn rotated(&self, angle: f64) -> ForceMultiplet {
        let (s, c) = angle.sin_cos();
        let rot = |v: Vec2| Vec2::new(c * v.x - s * v.y, s * v.x + c * v.y);
        ForceMultiplet {
            points: self.points.iter().map(|&p| rot(p)).collect(),
            forces: self.forces.iter().map(|&t| rot(t)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalanceReport {
    /// Sum of forces.
    pub force_residual: Vec2,
    /// Sum of `x_i . R t_i` about the origin.
    pub torque_residual: f64,
    pub balanced: bool,
}

pub fn check_balance(f: &ForceMultiplet) -> BalanceReport {
    let force_residual: Vec2 = f.forces.iter().copied().sum();
    let torque_residual: f64 = f.points.iter().zip(&f.forces).map(|(&x, &t)| x.dot(rotate90cw(t))).sum();
    // judge the torque about the centroid so that far-away origins do not hide imbalance
    let c = f.points.iter().copied().sum::<Vec2>() * (1.0 / f.len() as f64);
    let local_torque = torque_residual - c.dot(rotate90cw(force_residual));
    let fscale = f.forces.iter().map(|t| t.norm()).sum::<f64>().max(f64::MIN_POSITIVE);
    let tau = tolerance();
    let balanced = force_residual.norm() <= tau * fscale
        && local_torque.abs() <= tau * fscale * f.diameter().max(f64::MIN_POSITIVE);
    BalanceReport { force_residual, torque_residual, balanced }
}

/// Outcome of the torque test. Indices are 1-based clockwise labels.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityCertificate {
    pub feasible: bool,
    /// First `(j, i)` whose partial torque sum is negative; `i` is reduced mod n.
    pub violating_pair: Option<(usize, usize)>,
    /// Minimum of all partial sums (force x length).
    pub min_margin: f64,
    /// Pair attaining the minimum.
    pub min_pair: (usize, usize),
}

/// All partial torque sums `S(j, i) = sum_{k=j}^{i-1} (x_k - x_j) . R t_k` for
/// `j` in `0..n` and `i = j + off`, `off` in `2..n`, as `(j, off, value)`.
pub fn partial_torque_sums(points: &[Point2], forces: &[Vec2]) -> Vec<(usize, usize, f64)> {
    let n = points.len();
    let mut out = Vec::with_capacity(n * n.saturating_sub(2));
    for j in 0..n {
        let xj = points[j];
        let mut s = 0.0;
        for off in 1..n {
            let k = (j + off - 1) % n;
            s += (points[k] - xj).dot(rotate90cw(forces[k]));
            if off >= 2 {
                out.push((j, off, s));
            }
        }
    }
    out
}

/// Evaluates the torque test on raw data without convexity or balance checks.
pub fn torque_certificate(points: &[Point2], forces: &[Vec2]) -> FeasibilityCertificate {
    let n = points.len();
    let scale = forces.iter().map(|t| t.norm()).fold(0.0, f64::max) * geom::diameter(points);
    let tol = tolerance() * scale;
    let mut min_margin = f64::INFINITY;
    let mut min_pair = (1, 1);
    let mut violating_pair = None;
    for (j, off, s) in partial_torque_sums(points, forces) {
        let pair = (j + 1, (j + off) % n + 1);
        if s < min_margin {
            min_margin = s;
            min_pair = pair;
        }
        if s < -tol && violating_pair.is_none() {
            violating_pair = Some(pair);
        }
    }
    if !min_margin.is_finite() {
        min_margin = 0.0;
    }
    FeasibilityCertificate { feasible: violating_pair.is_none(), violating_pair, min_margin, min_pair }
}

fn check_preconditions(f: &ForceMultiplet) -> Result<()> {
    geom::check_clockwise_convex(&f.points)?;
    let b = check_balance(f);
    if !b.balanced {
        return Err(Error::NotBalanced { force: b.force_residual.norm(), torque: b.torque_residual });
    }
    Ok(())
}

/// Decides whether a tension-only web can carry `f` at the vertices of its
/// clockwise convex polygon.
pub fn check_tension_feasible(f: &ForceMultiplet) -> Result<FeasibilityCertificate> {
    check_preconditions(f)?;
    Ok(torque_certificate(&f.points, &f.forces))
}

/// Per-vertex elementary test: `-t_i` must point into the polygon.
pub fn edge_condition(f: &ForceMultiplet) -> Result<Vec<bool>> {
    check_preconditions(f)?;
    let n = f.len();
    let tol = tolerance() * f.torque_scale();
    Ok((0..n)
        .map(|i| {
            let rt = rotate90cw(f.forces[i]);
            let prev = f.points[(i + n - 1) % n];
            let next = f.points[(i + 1) % n];
            (f.points[i] - prev).dot(rt) >= -tol && (f.points[i] - next).dot(rt) <= tol
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    #[test]
    fn radial_square_is_balanced() {
        let r = check_balance(&samples::square_radial());
        assert!(r.balanced);
        assert!(r.force_residual.norm() < 1e-15 && r.torque_residual.abs() < 1e-15);
    }

    #[test]
    fn single_force_is_unbalanced() {
        let sq = samples::square_radial();
        let mut forces = vec![Vec2::ZERO; 4];
        forces[0] = Vec2::new(1.0, 0.0);
        let r = check_balance(&sq.with_forces(forces).unwrap());
        assert!(!r.balanced);
        assert_eq!(r.force_residual, Vec2::new(1.0, 0.0));
    }

    #[test]
    fn shear_square_is_balanced() {
        let r = check_balance(&samples::shear_square());
        assert!(r.balanced);
        assert_eq!(r.torque_residual, 0.0);
    }

    #[test]
    fn radial_square_is_feasible() {
        // 4 vertices x 2 nontrivial sums, each evaluated by hand:
        // off = 2: (x_{j+1} - x_j) . R t_{j+1} = 2/sqrt2
        // off = 3: adds (x_{j+2} - x_j) . R t_{j+2} = 0 (diagonal)
        let f = samples::square_radial();
        let sums = partial_torque_sums(f.points(), f.forces());
        assert_eq!(sums.len(), 8);
        for (_, off, s) in sums {
            assert!((s - std::f64::consts::SQRT_2).abs() < 1e-14, "off {off}: {s}");
        }
        let c = check_tension_feasible(&f).unwrap();
        assert!(c.feasible);
        assert!(c.violating_pair.is_none());
    }

    #[test]
    fn inward_diagonal_is_infeasible() {
        let f = samples::inward_diagonal();
        let c = check_tension_feasible(&f).unwrap();
        assert!(!c.feasible);
        let edges = edge_condition(&f).unwrap();
        assert!(!edges[0]);
    }

    #[test]
    fn scaling_scales_margin() {
        let f = samples::square_radial();
        let c1 = check_tension_feasible(&f).unwrap();
        let c2 = check_tension_feasible(&f.scaled(3.5)).unwrap();
        assert_eq!(c1.feasible, c2.feasible);
        assert!((c2.min_margin - 3.5 * c1.min_margin).abs() < 1e-12);
    }

    #[test]
    fn rejects_anticlockwise_points() {
        let f = samples::square_radial();
        let rev = ForceMultiplet::new(
            f.points().iter().rev().copied().collect(),
            f.forces().iter().rev().copied().collect(),
        )
        .unwrap();
        assert!(matches!(check_tension_feasible(&rev), Err(Error::NotConvex { .. })));
    }

    #[test]
    fn rejects_unbalanced() {
        let f = samples::square_radial();
        let mut t = f.forces().to_vec();
        t[0] = t[0] * 2.0;
        let g = f.with_forces(t).unwrap();
        assert!(matches!(check_tension_feasible(&g), Err(Error::NotBalanced { .. })));
    }

    #[test]
    fn regular_polygon_edges_pass() {
        for n in 3..12 {
            let f = samples::regular_polygon_radial(n, 1.0);
            assert!(edge_condition(&f).unwrap().iter().all(|&b| b));
        }
    }

    #[test]
    fn length_mismatch_rejected() {
        let r = ForceMultiplet::new(vec![Vec2::ZERO; 3], vec![Vec2::ZERO; 4]);
        assert!(matches!(r, Err(Error::InvalidInput(_))));
    }
}
