pub mod energy;
pub mod recover;
pub mod relax;
pub mod solve;
pub mod verify;

use std::fs::File;
use std::path::Path;
use std::sync::Arc;

use dirichlet_core::geometry::panelize_at_least;
use dirichlet_core::{build_grid, Domain, Grid3, SurfaceMesh};

use crate::config::{nonnegative, positive};
use crate::error::{CliError, CliResult};

pub fn domain_or(domain: Option<Domain>, default: Domain) -> CliResult<Domain> {
    let d = domain.unwrap_or(default);
    d.validate()?;
    Ok(d)
}

pub fn grid(domain: Domain, h: f64, padding: f64) -> CliResult<Arc<Grid3>> {
    let h = positive("h", h)?;
    let padding = nonnegative("padding", padding)?;
    Ok(Arc::new(build_grid(domain, h, padding)?))
}

pub fn mesh(domain: &Domain, panels: usize) -> CliResult<SurfaceMesh> {
    if panels == 0 {
        return Err(CliError::Invalid("panels must be at least 1".into()));
    }
    Ok(panelize_at_least(domain, panels)?)
}

pub fn open(path: &Path) -> CliResult<File> {
    File::open(path).map_err(|e| CliError::Invalid(format!("cannot open {}: {e}", path.display())))
}
