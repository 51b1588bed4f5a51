//! Numerical potential theory on uniform grids and surface panelizations.
//!
//! The crate covers the electrostatic reading of the Dirichlet principle:
//! point-charge energies, Newtonian volume and surface potentials and their
//! energies, Poisson recovery of densities from a potential, Green's first
//! identity and the Dirichlet-integral form of the total energy, a
//! Dirichlet-problem solver that minimizes the discrete Dirichlet energy, and
//! a constrained relaxation of repulsive point charges.
//!
//! Units follow the Gaussian convention with unit Coulomb constant: the force
//! between masses `m1`, `m2` at distance `r` is `m1 * m2 / r^2`.

pub mod electrostatics;
pub mod error;
pub mod geometry;
pub mod identities;
pub mod io;
pub mod potential;
pub mod relaxation;
pub mod report;
pub mod variational;

pub use error::{Error, Result};
pub use geometry::{build_grid, normal_probe_points, panelize, Domain, Grid3, NodeLabel, Panel, ScalarField, SurfaceMesh};
pub use report::EnergyReport;

/// Points and vectors in three dimensions.
pub type Vec3 = nalgebra::Vector3<f64>;
