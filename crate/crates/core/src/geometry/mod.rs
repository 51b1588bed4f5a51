//! Domains, uniform grids with interior/boundary/exterior masks, scalar
//! fields on them, and boundary panelizations.

mod domain;
pub mod faces;
mod field;
mod grid;
mod mesh;

pub use domain::Domain;
pub use field::ScalarField;
pub use grid::{build_grid, Grid3, NodeLabel};
pub use mesh::{normal_probe_points, panelize, panelize_at_least, Panel, SurfaceMesh};
