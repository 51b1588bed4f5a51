use std::path::{Path, PathBuf};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use dirichlet_core::electrostatics::ChargeSet;
use dirichlet_core::io::{read_charges, write_charges, write_trace};
use dirichlet_core::relaxation::{relax, RelaxationConfig};
use dirichlet_core::{Domain, Error, Vec3};

use super::{domain_or, open};
use crate::config::{positive, RelaxSection, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::RunDir;

#[derive(Debug, Serialize)]
struct Resolved<'a> {
    domain: Domain,
    seed: u64,
    #[serde(flatten)]
    relax: &'a RelaxSection,
}

#[derive(Debug, Serialize)]
struct Summary {
    steps: usize,
    converged: bool,
    on_boundary: bool,
    final_energy: f64,
    final_max_grad: f64,
    max_boundary_distance: f64,
    min_pair_distance: f64,
}

/// `n` points drawn uniformly from the domain shrunk by `scale` about its
/// centre.
fn random_start(domain: &Domain, n: usize, scale: f64, seed: u64) -> Vec<Vec3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = domain.bounding_box();
    let centre = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let u = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if matches!(domain, Domain::Ball { .. }) && u.norm() >= 1.0 {
            continue;
        }
        out.push(centre + scale * half.component_mul(&u));
    }
    out
}

pub fn run(cfg: &RunConfig, out: &Path) -> CliResult<PathBuf> {
    let name = cfg.name()?;
    let mut section = cfg.relax.clone();
    if let Some(t) = cfg.tol {
        section.grad_tol = t;
    }
    let resolved = Resolved { domain: domain_or(cfg.domain, Domain::unit_ball())?, seed: cfg.seed.unwrap_or(0), relax: &section };

    let charges = match &section.charges {
        Some(path) => read_charges(open(path)?)?,
        None => {
            if section.n == 0 {
                return Err(CliError::Invalid("n must be at least 1".into()));
            }
            let scale = positive("init_radius", section.init_radius)?;
            if scale >= 1.0 {
                return Err(CliError::Invalid(format!("init_radius must be below 1, got {scale}")));
            }
            ChargeSet::uniform(random_start(&resolved.domain, section.n, scale, resolved.seed), section.mass)?
        }
    };
    let config = RelaxationConfig {
        domain: resolved.domain,
        charges,
        step: section.step,
        shrink: section.shrink,
        max_steps: section.max_steps,
        boundary_tol: section.boundary_tol,
        grad_tol: section.grad_tol,
    };
    config.validate()?;

    let mut dir = RunDir::create(out, "relax", &name)?;
    let trace = match relax(&config) {
        Ok(t) => t,
        Err(e @ Error::Stalled { .. }) => {
            dir.finish("relax", &name, &resolved, "stalled")?;
            return Err(e.into());
        }
        Err(e) => return Err(e.into()),
    };

    let p = &trace.final_positions;
    let mut min_pair = f64::INFINITY;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            min_pair = min_pair.min((p[i] - p[j]).norm());
        }
    }
    let on_boundary = trace.on_boundary(section.boundary_tol);
    let summary = Summary {
        steps: trace.energies.len() - 1,
        converged: trace.converged,
        on_boundary,
        final_energy: trace.final_energy(),
        final_max_grad: trace.max_grads.last().copied().unwrap_or(f64::NAN),
        max_boundary_distance: trace.boundary_distances.iter().copied().fold(0.0, f64::max),
        min_pair_distance: min_pair,
    };
    dir.write_with("trace.csv", |w| write_trace(&trace, w))?;
    dir.write_with("final_positions.csv", |w| write_charges(p, config.charges.masses(), w))?;
    dir.write_json("summary.json", &summary)?;

    let failure = if !trace.converged {
        Some(format!("relaxation reached max_steps = {} with gradient {:.3e}", section.max_steps, summary.final_max_grad))
    } else if !on_boundary {
        Some(format!(
            "relaxation converged but a charge sits {:.3e} from the boundary (boundary_tol {:.1e})",
            summary.max_boundary_distance, section.boundary_tol
        ))
    } else {
        None
    };
    let status = if failure.is_some() { "not_converged" } else { "ok" };
    let path = dir.finish("relax", &name, &resolved, status)?;
    match failure {
        Some(msg) => Err(CliError::Unconverged(msg)),
        None => Ok(path),
    }
}
