//! Canonical load cases used in tests, documentation and the CLI.

use std::f64::consts::PI;

use crate::geom::Vec2;
use crate::statics::ForceMultiplet;

/// Unit outward radial forces at the corners of the square `[-1, 1]^2`, clockwise
/// from `(-1, 1)`.
pub fn square_radial() -> ForceMultiplet {
    let pts = square_corners();
    let forces = pts.iter().map(|p| p.normalized().unwrap()).collect();
    ForceMultiplet::new(pts, forces).unwrap()
}

/// Clockwise corners `(-1,1), (1,1), (1,-1), (-1,-1)`.
pub fn square_corners() -> Vec<Vec2> {
    vec![Vec2::new(-1.0, 1.0), Vec2::new(1.0, 1.0), Vec2::new(1.0, -1.0), Vec2::new(-1.0, -1.0)]
}

/// Pulls along the diagonal pointing into the square at vertices 1 and 3.
pub fn inward_diagonal() -> ForceMultiplet {
    let forces = vec![Vec2::new(1.0, -1.0), Vec2::ZERO, Vec2::new(-1.0, 1.0), Vec2::ZERO];
    ForceMultiplet::new(square_corners(), forces).unwrap()
}

/// Balanced shear pattern that no tension-only web can carry.
pub fn shear_square() -> ForceMultiplet {
    let forces = vec![Vec2::new(1.0, 0.0), Vec2::new(-1.0, 0.0), Vec2::new(-1.0, 0.0), Vec2::new(1.0, 0.0)];
    ForceMultiplet::new(square_corners(), forces).unwrap()
}

/// Vertices of a regular n-gon of the given circumradius, clockwise from angle pi/2.
pub fn regular_polygon(n: usize, radius: f64) -> Vec<Vec2> {
    (0..n)
        .map(|i| {
            let a = PI / 2.0 - 2.0 * PI * i as f64 / n as f64;
            Vec2::new(radius * a.cos(), radius * a.sin())
        })
        .collect()
}

/// Unit outward radial forces at the vertices of a regular n-gon.
pub fn regular_polygon_radial(n: usize, radius: f64) -> ForceMultiplet {
    let pts = regular_polygon(n, radius);
    let forces = pts.iter().map(|p| p.normalized().unwrap()).collect();
    ForceMultiplet::new(pts, forces).unwrap()
}

/// Loads of four wires from the square corners meeting at `centre`, the two top
/// wires at unit tension. `None` when no positive tensions balance the junction.
pub fn square_star(centre: Vec2) -> Option<ForceMultiplet> {
    let pts = square_corners();
    let u: Vec<Vec2> = pts.iter().map(|&p| (p - centre).normalized()).collect::<Option<_>>()?;
    let r = -(u[0] + u[1]);
    let det = u[2].cross(u[3]);
    let (q2, q3) = (r.cross(u[3]) / det, u[2].cross(r) / det);
    if !(q2 > 0.0 && q3 > 0.0) {
        return None;
    }
    ForceMultiplet::new(pts, vec![u[0], u[1], u[2] * q2, u[3] * q3]).ok()
}
