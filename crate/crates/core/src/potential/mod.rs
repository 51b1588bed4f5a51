//! Newtonian volume potentials, surface (single-layer) potentials and their
//! energies by midpoint quadrature on [`Grid3`] cells and mesh panels.
//!
//! Each grid node is the centre of a cube of side h carrying charge
//! `ρ h³`. When a target lies in a source cell, that cell contributes the
//! exact integral of 1/r over a cube centred at the target. When a target is
//! within one panel size of a panel centroid, that panel contributes the mean
//! of 1/r over a disc of the same area in the panel plane.

pub mod kernels;

use crate::report::EnergyReport;
use crate::{Error, Grid3, Result, ScalarField, SurfaceMesh, Vec3};

use kernels::{cube_self_integral, disc_mean_inverse_distance};

/// Volume density on a grid plus per-panel surface density.
#[derive(Debug, Clone)]
pub struct DensityField {
    pub volume: ScalarField,
    pub surface: Vec<f64>,
}

impl DensityField {
    pub fn energy(&self, mesh: &SurfaceMesh) -> Result<EnergyReport> {
        total_energy(&self.volume, mesh, &self.surface)
    }
}

/// `U = U_vol + U_S` sampled on the nodes of one grid.
#[derive(Debug, Clone)]
pub struct PotentialSplit {
    pub volume_part: ScalarField,
    pub surface_part: ScalarField,
    pub total: ScalarField,
}

/// Both quadratures of the mutual energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MutualEnergy {
    /// `∭ ρ U_S dV`.
    pub via_volume: f64,
    /// `∬ σ U_vol dS`.
    pub via_surface: f64,
}

impl MutualEnergy {
    pub fn relative_gap(&self) -> f64 {
        let scale = self.via_volume.abs().max(self.via_surface.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.via_volume - self.via_surface).abs() / scale
        }
    }
}

struct VolumeSources<'a> {
    grid: &'a Grid3,
    nodes: Vec<usize>,
    points: Vec<Vec3>,
    charges: Vec<f64>,
    densities: Vec<f64>,
}

impl<'a> VolumeSources<'a> {
    fn new(rho: &'a ScalarField) -> Self {
        let grid = rho.grid();
        let vol = grid.cell_volume();
        let nodes: Vec<usize> = (0..grid.len()).filter(|&i| rho.value(i) != 0.0).collect();
        VolumeSources {
            grid,
            points: nodes.iter().map(|&i| grid.position(i)).collect(),
            charges: nodes.iter().map(|&i| rho.value(i) * vol).collect(),
            densities: nodes.iter().map(|&i| rho.value(i)).collect(),
            nodes,
        }
    }

    /// Index of the node whose cell contains `x`, if any.
    fn containing_cell(&self, x: &Vec3) -> Option<usize> {
        let g = self.grid;
        let rel = (x - g.origin()) / g.spacing();
        let dims = g.dims();
        let mut ijk = [0usize; 3];
        for a in 0..3 {
            let r = rel[a].round();
            if r < 0.0 || r as usize >= dims[a] {
                return None;
            }
            ijk[a] = r as usize;
        }
        Some(g.index(ijk[0], ijk[1], ijk[2]))
    }

    fn potential_at(&self, x: &Vec3, cell: Option<usize>) -> f64 {
        let self_term = cube_self_integral(self.grid.spacing());
        let mut u = 0.0;
        for k in 0..self.nodes.len() {
            if Some(self.nodes[k]) == cell {
                u += self.densities[k] * self_term;
            } else {
                u += self.charges[k] / (x - self.points[k]).norm();
            }
        }
        u
    }
}

/// `U(x) = ∭ ρ(y) / |x − y| dV(y)` at arbitrary targets.
pub fn volume_potential(rho: &ScalarField, targets: &[Vec3]) -> Vec<f64> {
    let src = VolumeSources::new(rho);
    targets.iter().map(|t| src.potential_at(t, src.containing_cell(t))).collect()
}

/// Volume potential at every node of `rho`'s grid.
pub fn volume_potential_on_grid(rho: &ScalarField) -> ScalarField {
    let src = VolumeSources::new(rho);
    let grid = rho.grid();
    let values = (0..grid.len()).map(|i| src.potential_at(&grid.position(i), Some(i))).collect();
    ScalarField::from_parts_unchecked(rho.grid_arc().clone(), values)
}

struct SurfaceSources {
    centroids: Vec<Vec3>,
    normals: Vec<Vec3>,
    charges: Vec<f64>,
    near2: Vec<f64>,
    disc_radius: Vec<f64>,
}

impl SurfaceSources {
    fn new(mesh: &SurfaceMesh, sigma: &[f64]) -> Result<Self> {
        if sigma.len() != mesh.len() {
            return Err(Error::LengthMismatch { what: "panel densities", expected: mesh.len(), actual: sigma.len() });
        }
        if let Some(index) = sigma.iter().position(|s| !s.is_finite()) {
            return Err(Error::NonFinite { what: "panel densities", index });
        }
        let mut s = SurfaceSources {
            centroids: Vec::new(),
            normals: Vec::new(),
            charges: Vec::new(),
            near2: Vec::new(),
            disc_radius: Vec::new(),
        };
        for (p, &sg) in mesh.iter().zip(sigma) {
            if sg == 0.0 {
                continue;
            }
            s.centroids.push(p.centroid);
            s.normals.push(p.normal);
            s.charges.push(sg * p.area);
            s.near2.push(p.area);
            s.disc_radius.push((p.area / std::f64::consts::PI).sqrt());
        }
        Ok(s)
    }

    fn potential_at(&self, x: &Vec3) -> f64 {
        let mut u = 0.0;
        for k in 0..self.centroids.len() {
            let d = x - self.centroids[k];
            let r2 = d.norm_squared();
            if r2 < self.near2[k] {
                let z = d.dot(&self.normals[k]);
                let lateral = (r2 - z * z).max(0.0).sqrt();
                u += self.charges[k] * disc_mean_inverse_distance(self.disc_radius[k], z, lateral);
            } else {
                u += self.charges[k] / r2.sqrt();
            }
        }
        u
    }
}

/// `U(x) = ∬_S σ(ζ) / |x − ζ| dS(ζ)` at arbitrary targets.
pub fn surface_potential(mesh: &SurfaceMesh, sigma: &[f64], targets: &[Vec3]) -> Result<Vec<f64>> {
    let src = SurfaceSources::new(mesh, sigma)?;
    Ok(targets.iter().map(|t| src.potential_at(t)).collect())
}

/// Surface potential at every node of `grid`.
pub fn surface_potential_on_grid(mesh: &SurfaceMesh, sigma: &[f64], grid: std::sync::Arc<Grid3>) -> Result<ScalarField> {
    let src = SurfaceSources::new(mesh, sigma)?;
    let values = (0..grid.len()).map(|i| src.potential_at(&grid.position(i))).collect();
    Ok(ScalarField::from_parts_unchecked(grid, values))
}

/// `½ ∭ ρ U_vol dV`.
pub fn volume_self_energy(rho: &ScalarField) -> f64 {
    let src = VolumeSources::new(rho);
    let acc: f64 = (0..src.nodes.len())
        .map(|k| src.charges[k] * src.potential_at(&src.points[k], Some(src.nodes[k])))
        .sum();
    0.5 * acc
}

/// `½ ∬ σ U_S dS`.
pub fn surface_self_energy(mesh: &SurfaceMesh, sigma: &[f64]) -> Result<f64> {
    let src = SurfaceSources::new(mesh, sigma)?;
    let acc: f64 = (0..src.centroids.len()).map(|k| src.charges[k] * src.potential_at(&src.centroids[k])).sum();
    Ok(0.5 * acc)
}

/// Mutual energy of a volume and a surface distribution, both ways.
pub fn mutual_energy(rho: &ScalarField, mesh: &SurfaceMesh, sigma: &[f64]) -> Result<MutualEnergy> {
    let vol = VolumeSources::new(rho);
    let surf = SurfaceSources::new(mesh, sigma)?;
    let via_volume = (0..vol.nodes.len()).map(|k| vol.charges[k] * surf.potential_at(&vol.points[k])).sum();
    let via_surface = (0..surf.centroids.len())
        .map(|k| {
            let c = &surf.centroids[k];
            surf.charges[k] * vol.potential_at(c, vol.containing_cell(c))
        })
        .sum();
    Ok(MutualEnergy { via_volume, via_surface })
}

/// Energy of the combined distribution: both self-energies plus the mutual
/// energy, taken as the mean of its two quadratures so that `total` is the
/// four-integral expansion of `½∭ρU dV + ½∬σU dS` with `U = U_vol + U_S`.
pub fn total_energy(rho: &ScalarField, mesh: &SurfaceMesh, sigma: &[f64]) -> Result<EnergyReport> {
    let vol = VolumeSources::new(rho);
    let surf = SurfaceSources::new(mesh, sigma)?;
    let (mut vv, mut vs) = (0.0, 0.0);
    for k in 0..vol.nodes.len() {
        let x = &vol.points[k];
        vv += vol.charges[k] * vol.potential_at(x, Some(vol.nodes[k]));
        vs += vol.charges[k] * surf.potential_at(x);
    }
    let (mut sv, mut ss) = (0.0, 0.0);
    for k in 0..surf.centroids.len() {
        let c = &surf.centroids[k];
        sv += surf.charges[k] * vol.potential_at(c, vol.containing_cell(c));
        ss += surf.charges[k] * surf.potential_at(c);
    }
    let volume_self = 0.5 * vv;
    let surface_self = 0.5 * ss;
    let mutual = 0.5 * (vs + sv);
    Ok(EnergyReport { volume_self, surface_self, mutual, total: volume_self + surface_self + mutual, ..Default::default() })
}

/// Volume, surface and total potentials on the nodes of `rho`'s grid.
pub fn potential_split(rho: &ScalarField, mesh: &SurfaceMesh, sigma: &[f64]) -> Result<PotentialSplit> {
    let volume_part = volume_potential_on_grid(rho);
    let surface_part = surface_potential_on_grid(mesh, sigma, rho.grid_arc().clone())?;
    let total = volume_part.combine(1.0, &surface_part, 1.0)?;
    Ok(PotentialSplit { volume_part, surface_part, total })
}
