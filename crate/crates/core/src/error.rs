use thiserror::Error;

/// Errors raised by the library. Vertex indices in messages are 1-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("all points are collinear; no two-dimensional hull exists")]
    AllCollinear,
    #[error("segments overlap along a collinear stretch")]
    Overlap,
    #[error("points are not in strictly convex clockwise position (vertex {vertex})")]
    NotConvex { vertex: usize },
    #[error("forces are not balanced (force residual {force:e}, torque residual {torque:e})")]
    NotBalanced { force: f64, torque: f64 },
    #[error("tangent planes violate the envelope inequality at plane {plane}, vertex {vertex}")]
    InfeasiblePlanes { plane: usize, vertex: usize },
    #[error("edge {edge} has zero length")]
    ZeroLengthEdge { edge: usize },
    #[error("interior node {node} is not in equilibrium (residual {residual:e})")]
    InteriorImbalance { node: usize, residual: f64 },
    #[error("no nonnegative tensions reproduce the target (residual {residual:e} at nodes {nodes:?})")]
    Infeasible { residual: f64, nodes: Vec<usize> },
    #[error("wires of the superimposed webs overlap along a segment")]
    CoincidentSegment,
    #[error("junctions of the superimposed webs coincide")]
    CoincidentJunction,
    #[error("no offset along the force direction puts the point in convex position")]
    NoConvexExtension,
    #[error("no roof placement stays above all base points at tilt {theta}")]
    NoValidRoof { theta: f64 },
    #[error("spoke direction is parallel to the force at vertex {vertex}")]
    ParallelSpoke { vertex: usize },
    #[error("ring members are not all compressive for ring fraction {rho}")]
    RingInfeasible { rho: f64 },
    #[error("tensor is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("projected points collapse")]
    DegenerateProjection,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
