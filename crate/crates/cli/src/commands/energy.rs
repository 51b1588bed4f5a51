use std::path::{Path, PathBuf};

use serde::Serialize;

use dirichlet_core::identities::complete_energy;
use dirichlet_core::io::{read_field, read_mesh, write_field, GridMeta};
use dirichlet_core::potential::{potential_split, total_energy};
use dirichlet_core::{Domain, EnergyReport, ScalarField, Vec3};

use super::{domain_or, grid, mesh, open};
use crate::config::{RunConfig, SurfaceDensitySpec, VolumeDensitySpec};
use crate::error::{CliError, CliResult};
use crate::output::RunDir;

#[derive(Debug, Serialize)]
struct Resolved<'a> {
    domain: Domain,
    h: f64,
    padding: f64,
    panels: usize,
    rho: &'a VolumeDensitySpec,
    sigma: &'a SurfaceDensitySpec,
    dirichlet: bool,
}

#[derive(Debug, Serialize)]
struct EnergyOutput {
    #[serde(flatten)]
    report: EnergyReport,
    /// `|total − complete| / |complete|`, when the Dirichlet side was run.
    chain_gap: Option<f64>,
    panels: usize,
    grid: GridMeta,
}

pub fn run(cfg: &RunConfig, out: &Path) -> CliResult<PathBuf> {
    let name = cfg.name()?;
    let e = &cfg.energy;
    let resolved = Resolved {
        domain: domain_or(cfg.domain, Domain::unit_ball())?,
        h: cfg.h.unwrap_or(0.1),
        padding: cfg.padding.unwrap_or(0.5),
        panels: cfg.panels.unwrap_or(1250),
        rho: &e.rho,
        sigma: &e.sigma,
        dirichlet: e.dirichlet,
    };
    let grid = grid(resolved.domain, resolved.h, resolved.padding)?;

    let rho = match &e.rho {
        VolumeDensitySpec::Zero => ScalarField::zeros(grid.clone()),
        &VolumeDensitySpec::UniformBall { center, radius, value } => {
            let c = Vec3::from(center);
            if !(radius > 0.0 && value.is_finite() && c.iter().all(|v| v.is_finite())) {
                return Err(CliError::Invalid("uniform_ball needs a finite centre, positive radius and finite value".into()));
            }
            ScalarField::from_fn(grid.clone(), |p| if (p - c).norm() < radius { value } else { 0.0 })
        }
        VolumeDensitySpec::Csv { path } => read_field(grid.clone(), open(path)?)?,
    };
    let (mesh, sigma) = match &e.sigma {
        SurfaceDensitySpec::Zero => {
            let m = mesh(&resolved.domain, resolved.panels)?;
            let n = m.len();
            (m, vec![0.0; n])
        }
        &SurfaceDensitySpec::Uniform { value } => {
            if !value.is_finite() {
                return Err(CliError::Invalid("surface density must be finite".into()));
            }
            let m = mesh(&resolved.domain, resolved.panels)?;
            let n = m.len();
            (m, vec![value; n])
        }
        SurfaceDensitySpec::Csv { path } => match read_mesh(open(path)?)? {
            (m, Some(v)) => (m, v),
            (_, None) => return Err(CliError::Invalid(format!("{} has no value column", path.display()))),
        },
    };

    let mut report = total_energy(&rho, &mesh, &sigma)?;
    let mut dir = RunDir::create(out, "energy", &name)?;
    let mut chain_gap = None;
    if e.dirichlet {
        let u = potential_split(&rho, &mesh, &sigma)?.total;
        let d = complete_energy(&u);
        report.dirichlet_interior = d.dirichlet_interior;
        report.dirichlet_exterior = d.dirichlet_exterior;
        report.exterior_tail = d.exterior_tail;
        report.complete_energy = d.complete_energy;
        chain_gap = Some(report.chain_gap());
        dir.write_with("potential.csv", |w| write_field(&u, w))?;
    }
    let output = EnergyOutput { report, chain_gap, panels: mesh.len(), grid: GridMeta::new(&grid, resolved.padding) };
    dir.write_json("energy.json", &output)?;
    dir.finish("energy", &name, &resolved, "ok")
}
