//! Grid faces (edges between axis-adjacent nodes) and their quadrature
//! weights. A face stands for the cube of side h centred at its midpoint.

use super::{Domain, Grid3, NodeLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Face {
    pub lower: usize,
    pub upper: usize,
    pub axis: usize,
}

pub fn faces(grid: &Grid3) -> impl Iterator<Item = Face> + '_ {
    (0..grid.len()).flat_map(move |idx| {
        (0..3).filter_map(move |axis| grid.neighbor(idx, axis, true).map(|upper| Face { lower: idx, upper, axis }))
    })
}

/// Weight of `face` in the closed domain Ω̄.
///
/// Faces touching an interior node count fully, which makes the Euler-Lagrange
/// equation of the weighted Dirichlet sum the 7-point Laplacian at every
/// interior node. The remaining faces carry the fraction of their dual cube
/// inside Ω̄ (trapezoidal weights on box faces and edges).
pub fn domain_weight(grid: &Grid3, face: &Face) -> f64 {
    if grid.label(face.lower) == NodeLabel::Interior || grid.label(face.upper) == NodeLabel::Interior {
        return 1.0;
    }
    let mid = 0.5 * (grid.position(face.lower) + grid.position(face.upper));
    grid.domain().cube_fraction(&mid, grid.spacing())
}

/// Weight of `face` in the whole grid box (trapezoidal on the outer layer).
pub fn grid_box_weight(grid: &Grid3, face: &Face) -> f64 {
    let (lo, hi) = grid.extent();
    let mid = 0.5 * (grid.position(face.lower) + grid.position(face.upper));
    Domain::Box { lo, hi }.cube_fraction(&mid, grid.spacing())
}
