//! Poisson recovery of densities from a potential, Green's first identity on
//! the grid, and the Dirichlet-integral form of the energy.

use std::f64::consts::PI;

use serde::Serialize;

use crate::geometry::faces::{domain_weight, faces, grid_box_weight};
use crate::geometry::panelize_at_least;
use crate::potential::total_energy;
use crate::report::EnergyReport;
use crate::variational::dirichlet_energy;
use crate::{Domain, Error, NodeLabel, Result, ScalarField, SurfaceMesh, Vec3};

fn laplacian_sum(u: &ScalarField, idx: usize) -> f64 {
    let grid = u.grid();
    grid.neighbors(idx).map(|j| u.value(j)).sum::<f64>() - 6.0 * u.value(idx)
}

/// Volume density recovered from `Δ_h U + 4πρ = 0`.
#[derive(Debug, Clone)]
pub struct RecoveredDensity {
    /// `ρ_h`, zero at absent nodes.
    pub field: ScalarField,
    /// Whether the node was evaluated.
    pub present: Vec<bool>,
}

/// `ρ_h = −Δ_h U / 4π` at interior and exterior nodes with a full stencil.
///
/// Boundary nodes are skipped: their stencils straddle S, where a surface
/// layer makes the Laplacian a measure rather than a function.
pub fn recover_volume_density(u: &ScalarField) -> RecoveredDensity {
    let grid = u.grid();
    let h2 = grid.spacing() * grid.spacing();
    let mut values = vec![0.0; grid.len()];
    let mut present = vec![false; grid.len()];
    for idx in 0..grid.len() {
        if grid.label(idx) != NodeLabel::Boundary && grid.has_full_stencil(idx) {
            values[idx] = -laplacian_sum(u, idx) / (h2 * 4.0 * PI);
            present[idx] = true;
        }
    }
    RecoveredDensity { field: ScalarField::from_parts_unchecked(u.grid_arc().clone(), values), present }
}

/// Potential samples on the normal line through every panel centroid, at
/// offsets `0, ±δ, ±2δ`.
#[derive(Debug, Clone)]
pub struct SurfaceProbes {
    pub delta: f64,
    pub on_surface: Vec<f64>,
    /// Values at `+δ` and `+2δ` along the outward normal.
    pub outside: [Vec<f64>; 2],
    /// Values at `−δ` and `−2δ`.
    pub inside: [Vec<f64>; 2],
}

impl SurfaceProbes {
    pub fn sample(mesh: &SurfaceMesh, delta: f64, u: impl Fn(&Vec3) -> f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::invalid("delta", format!("probe offset must be positive, got {delta}")));
        }
        let at = |s: f64| -> Result<Vec<f64>> {
            mesh.iter()
                .enumerate()
                .map(|(i, p)| {
                    let v = u(&(p.centroid + p.normal * s));
                    if v.is_finite() {
                        Ok(v)
                    } else {
                        Err(Error::NonFinite { what: "potential probe", index: i })
                    }
                })
                .collect()
        };
        Ok(SurfaceProbes {
            delta,
            on_surface: at(0.0)?,
            outside: [at(delta)?, at(2.0 * delta)?],
            inside: [at(-delta)?, at(-2.0 * delta)?],
        })
    }

    pub fn len(&self) -> usize {
        self.on_surface.len()
    }

    pub fn is_empty(&self) -> bool {
        self.on_surface.is_empty()
    }
}

/// `σ = −(∂U/∂n₊ − ∂U/∂n₋) / 4π` per panel, both one-sided derivatives taken
/// to second order: `(4U(δ) − U(2δ) − 3U(0)) / 2δ` outside and its mirror
/// image inside.
pub fn recover_surface_density(mesh: &SurfaceMesh, probes: &SurfaceProbes) -> Result<Vec<f64>> {
    let n = mesh.len();
    for v in [&probes.on_surface, &probes.outside[0], &probes.outside[1], &probes.inside[0], &probes.inside[1]] {
        if v.len() != n {
            return Err(Error::LengthMismatch { what: "surface probes", expected: n, actual: v.len() });
        }
    }
    let d = probes.delta;
    Ok((0..n)
        .map(|i| {
            let u0 = probes.on_surface[i];
            let plus = (4.0 * probes.outside[0][i] - probes.outside[1][i] - 3.0 * u0) / (2.0 * d);
            let minus = (3.0 * u0 - 4.0 * probes.inside[0][i] + probes.inside[1][i]) / (2.0 * d);
            -(plus - minus) / (4.0 * PI)
        })
        .collect())
}

/// Both sides of `∬ A ∂B/∂n dS = ∭ A ΔB dV + ∭ ∇A·∇B dV`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GreenResidual {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

/// Discrete Green's first identity on the union of the dual cells of the
/// interior nodes.
///
/// The surface term runs over faces joining an interior node to a boundary
/// node: `A` is averaged over the face and `∂B/∂n` is the face difference.
/// The volume term uses the 7-point Laplacian and central gradients at
/// interior nodes.
pub fn greens_first_identity_residual(a: &ScalarField, b: &ScalarField) -> Result<GreenResidual> {
    a.check_same_grid(b)?;
    let grid = a.grid();
    let h = grid.spacing();
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for i in grid.nodes_with(NodeLabel::Interior) {
        for axis in 0..3 {
            for forward in [false, true] {
                let j = grid.neighbor(i, axis, forward).expect("interior nodes have full stencils");
                if grid.label(j) != NodeLabel::Interior {
                    lhs += 0.5 * (a.value(i) + a.value(j)) * (b.value(j) - b.value(i)) * h;
                }
            }
        }
        let mut grad = 0.0;
        for axis in 0..3 {
            let (m, p) = (grid.neighbor(i, axis, false).unwrap(), grid.neighbor(i, axis, true).unwrap());
            grad += (a.value(p) - a.value(m)) * (b.value(p) - b.value(m)) / 4.0;
        }
        rhs += a.value(i) * laplacian_sum(b, i) * h + grad * h;
    }
    Ok(GreenResidual { lhs, rhs, residual: lhs - rhs })
}

/// `∫_{S²} dω / ρ(ω)` where `ρ(ω)` is the distance from the centre of the
/// box to its boundary in direction ω. Times `Q²`, this is the exterior
/// Dirichlet integral of `Q/r` outside the box in the radial approximation.
fn inverse_exit_distance_integral(half: &Vec3) -> f64 {
    let sphere = panelize_at_least(&Domain::unit_ball(), 4000).expect("unit ball is valid");
    sphere
        .iter()
        .map(|p| {
            let w = p.normal;
            let rho = (0..3).filter(|&a| w[a] != 0.0).map(|a| half[a] / w[a].abs()).fold(f64::INFINITY, f64::min);
            p.area / rho
        })
        .sum()
}

/// Least-squares monopole `U ≈ Q / |x − c|` on the outermost node layer,
/// `c` the grid-box centre.
fn far_field_charge(u: &ScalarField, center: &Vec3) -> f64 {
    let grid = u.grid();
    let dims = grid.dims();
    let (mut num, mut den) = (0.0, 0.0);
    for idx in 0..grid.len() {
        let ijk = grid.ijk(idx);
        if (0..3).any(|a| ijk[a] == 0 || ijk[a] + 1 == dims[a]) {
            let r = (grid.position(idx) - center).norm();
            num += u.value(idx) / r;
            den += 1.0 / (r * r);
        }
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// `E = (∭_Ω |∇U|² + ∭_ext(Ω) |∇U|²) / 8π` from a potential sampled on a
/// padded grid.
///
/// The interior integral is [`dirichlet_energy`]. The exterior integral is
/// the face sum over the rest of the grid box plus a monopole estimate of the
/// part beyond the box, with the charge fitted to the outermost node layer.
pub fn complete_energy(u: &ScalarField) -> EnergyReport {
    let grid = u.grid();
    let h = grid.spacing();
    let vals = u.values();
    let dirichlet_interior = dirichlet_energy(u);
    let mut grid_exterior = 0.0;
    for f in faces(grid) {
        let d = vals[f.upper] - vals[f.lower];
        if d != 0.0 {
            grid_exterior += (grid_box_weight(grid, &f) - domain_weight(grid, &f)).max(0.0) * d * d;
        }
    }
    grid_exterior *= h;
    let (lo, hi) = grid.extent();
    let center = 0.5 * (lo + hi);
    let q = far_field_charge(u, &center);
    let exterior_tail = if q == 0.0 { 0.0 } else { q * q * inverse_exit_distance_integral(&(0.5 * (hi - lo))) };
    let dirichlet_exterior = grid_exterior + exterior_tail;
    EnergyReport {
        dirichlet_interior,
        dirichlet_exterior,
        exterior_tail,
        complete_energy: (dirichlet_interior + dirichlet_exterior) / (8.0 * PI),
        ..Default::default()
    }
}

/// The density-weighted and Dirichlet forms of the energy of one potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyChain {
    /// [`total_energy`] of the recovered densities, with the Dirichlet
    /// fields filled from [`complete_energy`].
    pub report: EnergyReport,
    pub relative_gap: f64,
}

/// Recovers `ρ` from the grid samples of `u` and `σ` from `sample`, which
/// must evaluate the same potential off the grid, then compares the two
/// energy forms.
pub fn energy_chain(u: &ScalarField, mesh: &SurfaceMesh, delta: f64, sample: impl Fn(&Vec3) -> f64) -> Result<EnergyChain> {
    let rho = recover_volume_density(u).field;
    let probes = SurfaceProbes::sample(mesh, delta, sample)?;
    let sigma = recover_surface_density(mesh, &probes)?;
    let density = total_energy(&rho, mesh, &sigma)?;
    let dirichlet = complete_energy(u);
    let report = EnergyReport {
        dirichlet_interior: dirichlet.dirichlet_interior,
        dirichlet_exterior: dirichlet.dirichlet_exterior,
        exterior_tail: dirichlet.exterior_tail,
        complete_energy: dirichlet.complete_energy,
        ..density
    };
    Ok(EnergyChain { relative_gap: report.chain_gap(), report })
}
