use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::Serialize;

use dirichlet_core::identities::{recover_surface_density, recover_volume_density, SurfaceProbes};
use dirichlet_core::io::{read_field, write_field, write_mesh, GridMeta};
use dirichlet_core::{normal_probe_points, Domain, ScalarField, Vec3};

use super::{domain_or, grid, mesh, open};
use crate::config::{positive, PotentialSpec, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::RunDir;

#[derive(Debug, Serialize)]
struct Resolved<'a> {
    domain: Domain,
    h: f64,
    padding: f64,
    panels: usize,
    delta: f64,
    potential: &'a PotentialSpec,
}

#[derive(Debug, Serialize)]
struct Summary {
    volume_nodes: usize,
    rho_max_abs: f64,
    volume_charge: f64,
    panels: usize,
    sigma_min: f64,
    sigma_max: f64,
    surface_charge: f64,
    grid: GridMeta,
}

pub fn run(cfg: &RunConfig, out: &Path) -> CliResult<PathBuf> {
    let name = cfg.name()?;
    let r = &cfg.recover;
    let h = cfg.h.unwrap_or(0.1);
    let resolved = Resolved {
        domain: domain_or(cfg.domain, Domain::unit_ball())?,
        h,
        padding: cfg.padding.unwrap_or(0.5),
        panels: cfg.panels.unwrap_or(1250),
        delta: positive("delta", r.delta.unwrap_or(2.0 * h))?,
        potential: &r.potential,
    };
    let grid = grid(resolved.domain, h, resolved.padding)?;
    let surface = mesh(&resolved.domain, resolved.panels)?;

    let (u, probes) = match &r.potential {
        &PotentialSpec::UniformSphere { sigma } => {
            let Domain::Ball { center, radius } = resolved.domain else {
                return Err(CliError::Invalid("uniform_sphere needs a ball domain".into()));
            };
            if !sigma.is_finite() {
                return Err(CliError::Invalid("sigma must be finite".into()));
            }
            let q = 4.0 * PI * sigma * radius * radius;
            let f = move |p: &Vec3| q / (p - center).norm().max(radius);
            (ScalarField::from_fn(grid.clone(), f), SurfaceProbes::sample(&surface, resolved.delta, f)?)
        }
        PotentialSpec::Csv { path } => {
            let u = read_field(grid.clone(), open(path)?)?;
            let (outer, inner) = normal_probe_points(&surface, 2.0 * resolved.delta)?;
            if outer.iter().chain(&inner).any(|p| u.interpolate(p).is_none()) {
                return Err(CliError::Invalid(format!(
                    "surface probes at 2 delta = {} leave the grid; increase padding",
                    2.0 * resolved.delta
                )));
            }
            let probes = SurfaceProbes::sample(&surface, resolved.delta, |p| u.interpolate(p).unwrap_or(f64::NAN))?;
            (u, probes)
        }
    };

    let rho = recover_volume_density(&u);
    let sigma = recover_surface_density(&surface, &probes)?;
    let cell = grid.cell_volume();
    let present = || (0..rho.present.len()).filter(|&i| rho.present[i]);
    let summary = Summary {
        volume_nodes: present().count(),
        rho_max_abs: present().map(|i| rho.field.value(i).abs()).fold(0.0, f64::max),
        volume_charge: present().map(|i| rho.field.value(i) * cell).sum(),
        panels: surface.len(),
        sigma_min: sigma.iter().copied().fold(f64::INFINITY, f64::min),
        sigma_max: sigma.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        surface_charge: surface.iter().zip(&sigma).map(|(p, s)| p.area * s).sum(),
        grid: GridMeta::new(&grid, resolved.padding),
    };

    let mut dir = RunDir::create(out, "recover", &name)?;
    dir.write_with("rho.csv", |w| write_field(&rho.field, w))?;
    dir.write_with("sigma.csv", |w| write_mesh(&surface, Some(&sigma), w))?;
    dir.write_json("summary.json", &summary)?;
    dir.finish("recover", &name, &resolved, "ok")
}
