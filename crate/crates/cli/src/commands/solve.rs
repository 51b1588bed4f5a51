use std::path::{Path, PathBuf};

use serde::Serialize;

use dirichlet_core::io::{read_boundary_values, write_field, GridMeta};
use dirichlet_core::variational::{solve, BoundaryData, Preconditioner, SolveSummary, SolverOptions};
use dirichlet_core::{Domain, Error, NodeLabel, Vec3};

use super::{domain_or, grid, open};
use crate::config::{positive, BoundarySpec, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::RunDir;

#[derive(Debug, Serialize)]
struct Resolved<'a> {
    domain: Domain,
    h: f64,
    padding: f64,
    tol: f64,
    max_iter: Option<usize>,
    preconditioner: Preconditioner,
    boundary: &'a BoundarySpec,
}

#[derive(Debug, Serialize)]
struct SolveOutput {
    #[serde(flatten)]
    summary: SolveSummary,
    /// Largest interior deviation from the exact harmonic function.
    max_error: Option<f64>,
    grid: GridMeta,
}

pub fn run(cfg: &RunConfig, out: &Path) -> CliResult<PathBuf> {
    let name = cfg.name()?;
    let s = &cfg.solve;
    let resolved = Resolved {
        domain: domain_or(cfg.domain, Domain::unit_cube())?,
        h: cfg.h.unwrap_or(0.1),
        padding: cfg.padding.unwrap_or(0.0),
        tol: positive("tol", cfg.tol.unwrap_or(1e-10))?,
        max_iter: s.max_iter,
        preconditioner: s.preconditioner,
        boundary: &s.boundary,
    };
    let grid = grid(resolved.domain, resolved.h, resolved.padding)?;

    let exact = s.boundary.exact();
    let data = match &s.boundary {
        BoundarySpec::Csv { path } => {
            let map = read_boundary_values(&grid, open(path)?)?;
            BoundaryData::from_map(grid.clone(), &map)?
        }
        BoundarySpec::ExternalPole { pole, q } => {
            let p = Vec3::from(*pole);
            let (lo, hi) = grid.extent();
            if !(p.iter().all(|v| v.is_finite()) && q.is_finite()) {
                return Err(CliError::Invalid("pole position and strength must be finite".into()));
            }
            if (0..3).all(|a| p[a] >= lo[a] && p[a] <= hi[a]) {
                return Err(CliError::Invalid(format!("pole {pole:?} lies inside the grid box")));
            }
            BoundaryData::from_fn(grid.clone(), exact.as_deref().expect("analytic boundary"))?
        }
        _ => BoundaryData::from_fn(grid.clone(), exact.as_deref().expect("analytic boundary"))?,
    };

    let opts = SolverOptions {
        tol: resolved.tol,
        max_iter: resolved.max_iter,
        preconditioner: resolved.preconditioner,
        initial: None,
    };
    let (result, failure) = match solve(&data, &opts) {
        Ok(r) => (r, None),
        Err(Error::NotConverged(r)) => {
            let msg = format!(
                "solver did not converge in {} iterations (residual {:.3e}, tol {:.1e})",
                r.iterations, r.harmonicity_residual, resolved.tol
            );
            (*r, Some(msg))
        }
        Err(e) => return Err(e.into()),
    };

    let max_error = exact.map(|f| {
        grid.nodes_with(NodeLabel::Interior)
            .map(|i| (result.field.value(i) - f(&grid.position(i))).abs())
            .fold(0.0, f64::max)
    });
    let mut dir = RunDir::create(out, "solve", &name)?;
    dir.write_json("result.json", &SolveOutput { summary: result.summary(), max_error, grid: GridMeta::new(&grid, resolved.padding) })?;
    dir.write_with("field.csv", |w| write_field(&result.field, w))?;
    let status = if failure.is_some() { "not_converged" } else { "ok" };
    let path = dir.finish("solve", &name, &resolved, status)?;
    match failure {
        Some(msg) => Err(CliError::Unconverged(msg)),
        None => Ok(path),
    }
}
