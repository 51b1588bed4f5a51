//! Identity checks at a base resolution `(h, panels)` and its refinement
//! `(h/2, 4 panels)`.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::Serialize;

use dirichlet_core::identities::{
    energy_chain, greens_first_identity_residual, recover_surface_density, recover_volume_density, SurfaceProbes,
};
use dirichlet_core::io::read_field;
use dirichlet_core::potential::mutual_energy;
use dirichlet_core::{Domain, ScalarField, Vec3};

use super::{domain_or, grid, mesh, open};
use crate::config::{positive, RunConfig, VerifySection};
use crate::error::{CliError, CliResult};
use crate::output::RunDir;

#[derive(Debug, Serialize)]
struct Resolved<'a> {
    h: f64,
    panels: usize,
    tolerances: &'a VerifySection,
    field_domain: Option<Domain>,
    field_padding: f64,
}

#[derive(Debug, Clone, Serialize)]
struct GreenRow {
    pair: &'static str,
    h: f64,
    lhs: f64,
    rhs: f64,
    residual: f64,
    relative: f64,
}

#[derive(Debug, Clone, Serialize)]
struct Check {
    name: String,
    value: f64,
    bound: f64,
    pass: bool,
}

struct Checks(Vec<Check>);

impl Checks {
    fn at_most(&mut self, name: impl Into<String>, value: f64, bound: f64) {
        self.0.push(Check { name: name.into(), value, bound, pass: value <= bound });
    }

    /// Refinement must not make `fine` worse than `coarse`, unless both are
    /// already at rounding level.
    fn refines(&mut self, name: impl Into<String>, coarse: f64, fine: f64, floor: f64) {
        let pass = fine < coarse || (coarse <= floor && fine <= floor);
        self.0.push(Check { name: name.into(), value: fine / coarse, bound: 1.0, pass });
    }
}

/// Relative residuals below this are rounding.
const ROUNDING_FLOOR: f64 = 1e-12;

fn relative(r: &dirichlet_core::identities::GreenResidual) -> f64 {
    r.residual.abs() / (r.lhs.abs() + r.rhs.abs()).max(f64::MIN_POSITIVE)
}

/// Supported in `|x| < 0.8`, so `σ = 0` and there is no far-field tail as
/// long as the surface probes stay outside the support.
fn bump(p: &Vec3) -> f64 {
    let r2 = p.norm_squared();
    if r2 < 0.64 {
        (1.0 - r2 / 0.64).powi(4)
    } else {
        0.0
    }
}

/// Potential of a unit surface density on the unit sphere.
fn shell(p: &Vec3) -> f64 {
    let r = p.norm();
    if r > 1.0 {
        4.0 * PI / r
    } else {
        4.0 * PI
    }
}

type Scalar = fn(&Vec3) -> f64;

struct Level {
    green: Vec<GreenRow>,
    mutual_gap: f64,
    chain_gap: f64,
    volume_error: f64,
    surface_error: f64,
}

fn level(h: f64, panels: usize) -> CliResult<Level> {
    let cube = grid(Domain::unit_cube(), h, 0.0)?;
    let pairs: [(&'static str, Scalar, Scalar); 2] = [
        ("x2_y2", |p| p.x * p.x, |p| p.y * p.y),
        ("generic", |p| (p.x + 0.5 * p.y).exp(), |p| (2.0 * p.y + p.z).sin() * p.x.cos()),
    ];
    let mut green = Vec::new();
    for (pair, a, b) in pairs {
        let r = greens_first_identity_residual(
            &ScalarField::from_fn(cube.clone(), a),
            &ScalarField::from_fn(cube.clone(), b),
        )?;
        green.push(GreenRow { pair, h, lhs: r.lhs, rhs: r.rhs, residual: r.residual, relative: relative(&r) });
    }

    let ball = Domain::unit_ball();
    let sphere = mesh(&ball, panels)?;
    let g = grid(ball, h, 0.0)?;
    let rho = ScalarField::from_fn(g, |p| if p.norm() < 1.0 { 1.0 + p.z } else { 0.0 });
    let sigma: Vec<f64> = sphere.iter().map(|p| 1.0 + 0.5 * p.centroid.x).collect();
    let mutual_gap = mutual_energy(&rho, &sphere, &sigma)?.relative_gap();

    let g = grid(ball, h, 0.2)?;
    let chain_gap = energy_chain(&ScalarField::from_fn(g, bump), &sphere, 0.5 * h, bump)?.relative_gap;

    let g = grid(ball, h, 2.0 * h)?;
    let rec = recover_volume_density(&ScalarField::from_fn(g, |p| -(2.0 * PI / 3.0) * p.norm_squared()));
    let volume_error = (0..rec.present.len())
        .filter(|&i| rec.present[i])
        .map(|i| (rec.field.value(i) - 1.0).abs())
        .fold(0.0, f64::max);

    let probes = SurfaceProbes::sample(&sphere, 0.5 * h, shell)?;
    let surface_error =
        recover_surface_density(&sphere, &probes)?.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max);

    Ok(Level { green, mutual_gap, chain_gap, volume_error, surface_error })
}

pub fn run(cfg: &RunConfig, out: &Path) -> CliResult<PathBuf> {
    let name = cfg.name()?;
    let mut tol = cfg.verify.clone();
    if let Some(t) = cfg.tol {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(CliError::Invalid(format!("tol must be nonnegative and finite, got {t}")));
        }
        tol.override_all(t);
    }
    let h = positive("h", cfg.h.unwrap_or(0.1))?;
    let panels = cfg.panels.unwrap_or(1250);
    let resolved = Resolved {
        h,
        panels,
        tolerances: &tol,
        field_domain: tol.field.as_ref().map(|_| domain_or(cfg.domain, Domain::unit_cube())).transpose()?,
        field_padding: cfg.padding.unwrap_or(0.0),
    };

    // validate the optional field before the expensive work
    let field = match (&tol.field, resolved.field_domain) {
        (Some(path), Some(d)) => Some(read_field(grid(d, h, resolved.field_padding)?, open(path)?)?),
        _ => None,
    };

    let coarse = level(h, panels)?;
    let fine = level(0.5 * h, 4 * panels)?;

    let mut checks = Checks(Vec::new());
    for (tag, l) in [("coarse", &coarse), ("fine", &fine)] {
        for row in &l.green {
            checks.at_most(format!("green_{}_{tag}", row.pair), row.relative, tol.green_tol);
        }
        checks.at_most(format!("mutual_gap_{tag}"), l.mutual_gap, tol.mutual_tol);
        checks.at_most(format!("chain_gap_{tag}"), l.chain_gap, tol.chain_tol);
        checks.at_most(format!("poisson_volume_{tag}"), l.volume_error, tol.volume_tol);
        checks.at_most(format!("poisson_surface_{tag}"), l.surface_error, tol.surface_tol);
    }
    checks.refines("green_generic_refinement", coarse.green[1].relative, fine.green[1].relative, ROUNDING_FLOOR);
    checks.refines("mutual_gap_refinement", coarse.mutual_gap, fine.mutual_gap, ROUNDING_FLOOR);
    checks.refines("chain_gap_refinement", coarse.chain_gap, fine.chain_gap, ROUNDING_FLOOR);
    checks.refines("poisson_surface_refinement", coarse.surface_error, fine.surface_error, ROUNDING_FLOOR);

    let mut green: Vec<GreenRow> = coarse.green.iter().chain(&fine.green).cloned().collect();
    if let Some(u) = &field {
        let r = greens_first_identity_residual(u, u)?;
        let rel = relative(&r);
        checks.at_most("green_field", rel, tol.green_tol);
        green.push(GreenRow { pair: "field", h, lhs: r.lhs, rhs: r.rhs, residual: r.residual, relative: rel });
    }

    let mut dir = RunDir::create(out, "verify", &name)?;
    dir.write_with("green.csv", |w| {
        let mut w = csv::Writer::from_writer(w);
        for row in &green {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    })?;
    dir.write_with("checks.csv", |w| {
        let mut w = csv::Writer::from_writer(w);
        for c in &checks.0 {
            w.serialize(c)?;
        }
        w.flush()?;
        Ok(())
    })?;
    let failed: Vec<String> = checks
        .0
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{} = {:.3e} (bound {:.1e})", c.name, c.value, c.bound))
        .collect();
    #[derive(Serialize)]
    struct Report<'a> {
        pass: bool,
        checks: &'a [Check],
        failed: &'a [String],
    }
    dir.write_json("report.json", &Report { pass: failed.is_empty(), checks: &checks.0, failed: &failed })?;
    let status = if failed.is_empty() { "ok" } else { "checks_failed" };
    let path = dir.finish("verify", &name, &resolved, status)?;
    if failed.is_empty() {
        Ok(path)
    } else {
        Err(CliError::ChecksFailed(failed))
    }
}
