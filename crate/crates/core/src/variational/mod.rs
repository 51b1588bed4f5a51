//! The Dirichlet problem as minimization of the discrete Dirichlet energy.
//!
//! The energy is a weighted sum over grid faces of squared forward
//! differences. Every face touching an interior node has weight one, so the
//! gradient of the energy with respect to an interior value is `−2h³ Δ_h u`
//! there: minimizers are exactly the fields annihilated by the 7-point
//! Laplacian at every interior node.
//!
//! The admissible class is every grid field that agrees with the boundary
//! data on all non-interior nodes. This is wider than the smooth extensions
//! of the continuum problem, which has no discrete counterpart.

mod cg;

use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};

use crate::geometry::faces::{domain_weight, faces};
use crate::{Error, Grid3, NodeLabel, Result, ScalarField, Vec3};

/// Prescribed values on every non-interior node of a grid.
///
/// Only boundary nodes enter the interior equations. Exterior nodes still
/// carry values because faces between two non-interior nodes contribute to
/// the energy where they lie partly inside the closed domain.
#[derive(Debug, Clone)]
pub struct BoundaryData {
    grid: Arc<Grid3>,
    values: Vec<f64>,
}

impl BoundaryData {
    /// Samples `f` at every non-interior node.
    pub fn from_fn(grid: Arc<Grid3>, f: impl Fn(&Vec3) -> f64) -> Result<Self> {
        let mut values = vec![0.0; grid.len()];
        for (idx, slot) in values.iter_mut().enumerate() {
            if grid.label(idx) != NodeLabel::Interior {
                let v = f(&grid.position(idx));
                if !v.is_finite() {
                    return Err(Error::NonFinite { what: "boundary data", index: idx });
                }
                *slot = v;
            }
        }
        Ok(BoundaryData { grid, values })
    }

    /// Explicit values keyed by node index. Every boundary node must be
    /// present. Exterior nodes without a value copy one from an adjacent
    /// node that has one, else get 0. Entries for interior nodes are ignored.
    pub fn from_map(grid: Arc<Grid3>, map: &HashMap<usize, f64>) -> Result<Self> {
        for (&idx, &v) in map {
            if idx >= grid.len() {
                return Err(Error::invalid("node", format!("node index {idx} outside grid of {} nodes", grid.len())));
            }
            if !v.is_finite() {
                return Err(Error::NonFinite { what: "boundary data", index: idx });
            }
        }
        if let Some(node) = grid.nodes_with(NodeLabel::Boundary).find(|n| !map.contains_key(n)) {
            return Err(Error::MissingBoundaryValue { node, ijk: grid.ijk(node) });
        }
        let mut values = vec![0.0; grid.len()];
        for idx in 0..grid.len() {
            values[idx] = match grid.label(idx) {
                NodeLabel::Interior => 0.0,
                NodeLabel::Boundary => map[&idx],
                NodeLabel::Exterior => map
                    .get(&idx)
                    .copied()
                    .or_else(|| grid.neighbors(idx).find_map(|nb| map.get(&nb).copied()))
                    .unwrap_or(0.0),
            };
        }
        Ok(BoundaryData { grid, values })
    }

    pub fn grid(&self) -> &Arc<Grid3> {
        &self.grid
    }

    /// Value at a non-interior node (0 at interior nodes).
    pub fn value(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    /// `(min, max)` over boundary nodes.
    pub fn range(&self) -> (f64, f64) {
        self.grid
            .nodes_with(NodeLabel::Boundary)
            .map(|i| self.values[i])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    }

    /// `max |f|` over boundary nodes.
    pub fn max_abs(&self) -> f64 {
        let (lo, hi) = self.range();
        lo.abs().max(hi.abs())
    }

    /// The admissible field with the given interior values.
    pub fn extend(&self, interior: impl Fn(usize) -> f64) -> ScalarField {
        let values = (0..self.grid.len())
            .map(|i| if self.grid.label(i) == NodeLabel::Interior { interior(i) } else { self.values[i] })
            .collect();
        ScalarField::from_parts_unchecked(self.grid.clone(), values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preconditioner {
    #[default]
    None,
    /// Diagonal scaling. The 7-point operator has constant diagonal, so this
    /// only rescales the iteration.
    Jacobi,
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Target for `max_i |6u_i − Σ_j u_j| / (1 + max|f|)` over interior nodes.
    pub tol: f64,
    /// Defaults to `10 · n^(2/3)` for `n` interior nodes.
    pub max_iter: Option<usize>,
    pub preconditioner: Preconditioner,
    /// Starting interior values (a full-grid field); zero if absent.
    pub initial: Option<ScalarField>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-10, max_iter: None, preconditioner: Preconditioner::None, initial: None }
    }
}

/// Outcome of [`solve`].
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub field: ScalarField,
    pub dirichlet_energy: f64,
    /// `max |h² Δ_h u| / (1 + max|f|)` over interior nodes.
    pub harmonicity_residual: f64,
    /// `max |Δ_h u|` over interior nodes.
    pub max_laplacian: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Scalars of a [`SolveResult`], for JSON output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub dirichlet_energy: f64,
    pub harmonicity_residual: f64,
    pub max_laplacian: f64,
    pub iterations: usize,
    pub converged: bool,
    pub interior_nodes: usize,
    pub h: f64,
}

impl SolveResult {
    pub fn summary(&self) -> SolveSummary {
        let grid = self.field.grid();
        SolveSummary {
            dirichlet_energy: self.dirichlet_energy,
            harmonicity_residual: self.harmonicity_residual,
            max_laplacian: self.max_laplacian,
            iterations: self.iterations,
            converged: self.converged,
            interior_nodes: grid.count(NodeLabel::Interior),
            h: grid.spacing(),
        }
    }
}

/// `D(u) = Σ_faces w (Δu)² h`: forward-difference gradients squared, times h³.
pub fn dirichlet_energy(field: &ScalarField) -> f64 {
    let grid = field.grid();
    let u = field.values();
    let h = grid.spacing();
    faces(grid)
        .map(|f| {
            let d = u[f.upper] - u[f.lower];
            if d == 0.0 {
                0.0
            } else {
                domain_weight(grid, &f) * d * d
            }
        })
        .sum::<f64>()
        * h
}

/// `D(u, v)`, the symmetric bilinear form with `D(u, u) = D(u)`.
pub fn dirichlet_form(u: &ScalarField, v: &ScalarField) -> Result<f64> {
    u.check_same_grid(v)?;
    let grid = u.grid();
    let (a, b) = (u.values(), v.values());
    let h = grid.spacing();
    Ok(faces(grid)
        .map(|f| {
            let p = (a[f.upper] - a[f.lower]) * (b[f.upper] - b[f.lower]);
            if p == 0.0 {
                0.0
            } else {
                domain_weight(grid, &f) * p
            }
        })
        .sum::<f64>()
        * h)
}

fn interior_laplacian_max(field: &ScalarField) -> f64 {
    let grid = field.grid();
    let u = field.values();
    grid.nodes_with(NodeLabel::Interior)
        .map(|i| (6.0 * u[i] - grid.neighbors(i).map(|j| u[j]).sum::<f64>()).abs())
        .fold(0.0, f64::max)
}

/// Minimizes `D` over fields equal to `f` off the interior by conjugate
/// gradients on the equivalent 7-point system.
///
/// Converged means `max |h² Δ_h u| ≤ tol · (1 + max|f|)` on the interior,
/// checked on the true residual. Otherwise returns
/// [`Error::NotConverged`] holding the last iterate.
pub fn solve(f: &BoundaryData, opts: &SolverOptions) -> Result<SolveResult> {
    if !(opts.tol >= 0.0 && opts.tol.is_finite()) {
        return Err(Error::invalid("tol", format!("tolerance must be finite and nonnegative, got {}", opts.tol)));
    }
    let grid = f.grid.clone();
    let sys = cg::InteriorSystem::new(&grid, &f.values);
    let max_iter = opts.max_iter.unwrap_or_else(|| (10.0 * (sys.len() as f64).powf(2.0 / 3.0)).ceil() as usize);
    let mut x = match &opts.initial {
        Some(init) => {
            if !grid.same_layout(init.grid()) {
                return Err(Error::GridMismatch);
            }
            sys.nodes.iter().map(|&n| init.value(n)).collect()
        }
        None => vec![0.0; sys.len()],
    };
    let scale = 1.0 + f.max_abs();
    let outcome = cg::conjugate_gradient(&sys, &mut x, opts.tol * scale, max_iter, opts.preconditioner == Preconditioner::Jacobi);

    let mut values = f.values.clone();
    for (k, &n) in sys.nodes.iter().enumerate() {
        values[n] = x[k];
    }
    let field = ScalarField::new(grid.clone(), values)?;
    let h = grid.spacing();
    let result = SolveResult {
        dirichlet_energy: dirichlet_energy(&field),
        harmonicity_residual: outcome.residual / scale,
        max_laplacian: interior_laplacian_max(&field) / (h * h),
        iterations: outcome.iterations,
        converged: outcome.converged,
        field,
    };
    if result.converged {
        Ok(result)
    } else {
        Err(Error::NotConverged(Box::new(result)))
    }
}

/// Admissible perturbation `h` (zero off the interior) and the scalars `x`
/// at which `D(u + x h)` is probed.
#[derive(Debug, Clone)]
pub struct PerturbationProbe {
    h_field: ScalarField,
    x_samples: Vec<f64>,
}

impl PerturbationProbe {
    pub fn new(h_field: ScalarField, x_samples: Vec<f64>) -> Result<Self> {
        let grid = h_field.grid();
        if let Some(idx) = (0..grid.len()).find(|&i| grid.label(i) != NodeLabel::Interior && h_field.value(i) != 0.0) {
            return Err(Error::invalid("h_field", format!("perturbation is nonzero at non-interior node {idx}")));
        }
        if let Some(index) = x_samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { what: "x samples", index });
        }
        Ok(PerturbationProbe { h_field, x_samples })
    }

    /// Uniform values in `[-1, 1)` on interior nodes.
    pub fn random(grid: Arc<Grid3>, rng: &mut impl Rng, x_samples: Vec<f64>) -> Result<Self> {
        let values = (0..grid.len())
            .map(|i| if grid.label(i) == NodeLabel::Interior { rng.random_range(-1.0..1.0) } else { 0.0 })
            .collect();
        PerturbationProbe::new(ScalarField::new(grid, values)?, x_samples)
    }

    pub fn zero(grid: Arc<Grid3>, x_samples: Vec<f64>) -> Result<Self> {
        PerturbationProbe::new(ScalarField::zeros(grid), x_samples)
    }

    pub fn h_field(&self) -> &ScalarField {
        &self.h_field
    }

    pub fn x_samples(&self) -> &[f64] {
        &self.x_samples
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionDeviation {
    /// `max_x |D(u + x h) − (D(u) + 2x D(u,h) + x² D(h))|`.
    pub max_deviation: f64,
    /// The same, each term divided by `1 + |D(u + x h)|`.
    pub max_relative: f64,
}

/// Compares `D(u + x h)` with its quadratic expansion at every probe `x`.
pub fn perturbation_expansion_check(u: &ScalarField, probe: &PerturbationProbe) -> Result<ExpansionDeviation> {
    let h = &probe.h_field;
    let du = dirichlet_energy(u);
    let duh = dirichlet_form(u, h)?;
    let dh = dirichlet_energy(h);
    let mut out = ExpansionDeviation { max_deviation: 0.0, max_relative: 0.0 };
    for &x in &probe.x_samples {
        let direct = dirichlet_energy(&u.combine(1.0, h, x)?);
        let expanded = du + 2.0 * x * duh + x * x * dh;
        let dev = (direct - expanded).abs();
        out.max_deviation = out.max_deviation.max(dev);
        out.max_relative = out.max_relative.max(dev / (1.0 + direct.abs()));
    }
    Ok(out)
}

/// Energy slack allowed below `D(u)`, relative to `1 + D(u) + D(h)`.
pub const MINIMALITY_ENERGY_TOL: f64 = 1e-10;
/// Bound on `|D(u, h)|`, relative to `1 + D(u) + D(h)`.
pub const FIRST_VARIATION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimalityReport {
    pub all_pass: bool,
    /// Largest `(D(u) − D(u + x h)) / scale` seen; nonpositive at a minimizer.
    pub max_energy_drop: f64,
    /// Largest `|D(u, h)| / scale`.
    pub max_first_variation: f64,
}

/// Checks `D(u + x h) ≥ D(u)` and `D(u, h) = 0` for every probe, with
/// tolerances [`MINIMALITY_ENERGY_TOL`] and [`FIRST_VARIATION_TOL`] scaled by
/// `1 + D(u) + D(h)`.
pub fn minimality_check(result: &SolveResult, probes: &[PerturbationProbe]) -> Result<MinimalityReport> {
    let u = &result.field;
    let du = dirichlet_energy(u);
    let mut report = MinimalityReport { all_pass: true, max_energy_drop: f64::NEG_INFINITY, max_first_variation: 0.0 };
    for probe in probes {
        let h = &probe.h_field;
        let scale = 1.0 + du + dirichlet_energy(h);
        let first = dirichlet_form(u, h)?.abs() / scale;
        report.max_first_variation = report.max_first_variation.max(first);
        if first > FIRST_VARIATION_TOL {
            report.all_pass = false;
        }
        for &x in &probe.x_samples {
            let drop = (du - dirichlet_energy(&u.combine(1.0, h, x)?)) / scale;
            report.max_energy_drop = report.max_energy_drop.max(drop);
            if drop > MINIMALITY_ENERGY_TOL {
                report.all_pass = false;
            }
        }
    }
    if report.max_energy_drop == f64::NEG_INFINITY {
        report.max_energy_drop = 0.0;
    }
    Ok(report)
}
