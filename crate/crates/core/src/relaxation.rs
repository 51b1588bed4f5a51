//! Repulsive point charges relaxed by projected gradient descent inside a
//! closed domain. Equilibria put every charge on the boundary.

use serde::{Deserialize, Serialize};

use crate::electrostatics::{assembly_energy, ChargeSet};
use crate::{Domain, Error, Result, Vec3};

/// Steps below this length count as a stall.
pub const MIN_STEP: f64 = 1e-15;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelaxationConfig {
    pub domain: Domain,
    pub charges: ChargeSet,
    /// Initial (and maximal) step length.
    pub step: f64,
    /// Backtracking factor in (0, 1).
    pub shrink: f64,
    pub max_steps: usize,
    pub boundary_tol: f64,
    /// Convergence threshold on the largest projected-gradient norm. A step
    /// of length `s` lowers the energy by about `s |g|²`, which must exceed
    /// the rounding error of `E`, so values much below `sqrt(ε |E| / step)`
    /// end in [`Error::Stalled`].
    pub grad_tol: f64,
}

impl RelaxationConfig {
    pub fn new(domain: Domain, charges: ChargeSet) -> Self {
        RelaxationConfig { domain, charges, step: 0.1, shrink: 0.5, max_steps: 20_000, boundary_tol: 1e-6, grad_tol: 1e-6 }
    }

    pub fn validate(&self) -> Result<()> {
        self.domain.validate()?;
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::invalid("step", format!("must be positive, got {}", self.step)));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::invalid("shrink", format!("must lie in (0, 1), got {}", self.shrink)));
        }
        for (name, v) in [("boundary_tol", self.boundary_tol), ("grad_tol", self.grad_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("must be positive, got {v}")));
            }
        }
        let m = self.charges.masses();
        if m.contains(&0.0) || !(m.iter().all(|&x| x > 0.0) || m.iter().all(|&x| x < 0.0)) {
            return Err(Error::invalid("masses", "all charges must be nonzero and of the same sign"));
        }
        if let Some(i) = self.charges.positions().iter().position(|p| !self.domain.contains_strictly(p, 0.0)) {
            return Err(Error::invalid("positions", format!("charge {i} is not strictly inside the domain")));
        }
        Ok(())
    }
}

/// Accepted iterates of a relaxation, the initial state first.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelaxationTrace {
    pub energies: Vec<f64>,
    /// Largest projected-gradient norm per recorded state.
    pub max_grads: Vec<f64>,
    /// Smallest distance of a charge to S per recorded state.
    pub min_boundary_distances: Vec<f64>,
    pub final_positions: Vec<Vec3>,
    pub boundary_distances: Vec<f64>,
    pub converged: bool,
}

impl RelaxationTrace {
    pub fn final_energy(&self) -> f64 {
        *self.energies.last().expect("trace holds the initial state")
    }

    /// Whether every charge ended within `tol` of the boundary.
    pub fn on_boundary(&self, tol: f64) -> bool {
        self.boundary_distances.iter().all(|&d| d <= tol)
    }

    /// Whether each recorded energy is strictly below the previous one.
    pub fn strictly_decreasing(&self) -> bool {
        self.energies.windows(2).all(|w| w[1] < w[0])
    }
}

/// `∂E/∂P_i = Σ_{j≠i} m_i m_j (P_j − P_i) / |P_j − P_i|³`, so `−∇E` is the
/// Coulomb force pushing charge `i` away from like charges.
pub fn energy_gradient(charges: &ChargeSet) -> Result<Vec<Vec3>> {
    let p = charges.positions();
    let m = charges.masses();
    let mut grad = vec![Vec3::zeros(); p.len()];
    for i in 0..p.len() {
        for j in 0..i {
            let d = p[j] - p[i];
            let r = d.norm();
            if r == 0.0 {
                return Err(Error::ZeroDistance { charge: i });
            }
            let f = d * (m[i] * m[j] / (r * r * r));
            grad[i] += f;
            grad[j] -= f;
        }
    }
    Ok(grad)
}

fn projected_max(domain: &Domain, positions: &[Vec3], grad: &[Vec3]) -> f64 {
    positions.iter().zip(grad).map(|(x, g)| domain.tangential_gradient(x, g).norm()).fold(0.0, f64::max)
}

fn min_distance(domain: &Domain, positions: &[Vec3]) -> f64 {
    positions.iter().map(|x| domain.distance_to_boundary(x)).fold(f64::INFINITY, f64::min)
}

/// Projected gradient descent with backtracking.
///
/// Each trial moves every charge by `−step · ∇E` and projects it back onto
/// the closed domain. A trial is accepted only if the energy strictly
/// decreases; then the step grows by `1/shrink` up to its initial value.
/// Otherwise the step shrinks. Stops when the largest projected-gradient
/// norm is at most `grad_tol` or after `max_steps` accepted steps.
pub fn relax(config: &RelaxationConfig) -> Result<RelaxationTrace> {
    config.validate()?;
    let domain = &config.domain;
    let mut charges = config.charges.clone();
    let mut energy = assembly_energy(&charges)?;
    let mut grad = energy_gradient(&charges)?;
    let mut trace = RelaxationTrace {
        energies: vec![energy],
        max_grads: vec![projected_max(domain, charges.positions(), &grad)],
        min_boundary_distances: vec![min_distance(domain, charges.positions())],
        final_positions: Vec::new(),
        boundary_distances: Vec::new(),
        converged: false,
    };
    let mut step = config.step;
    let mut accepted = 0;
    loop {
        if *trace.max_grads.last().unwrap() <= config.grad_tol {
            trace.converged = true;
            break;
        }
        if accepted >= config.max_steps {
            break;
        }
        let trial: Vec<Vec3> =
            charges.positions().iter().zip(&grad).map(|(x, g)| domain.project(&(x - g * step))).collect();
        let candidate = match charges.with_positions(trial) {
            Ok(c) => Some(c),
            Err(Error::ZeroDistance { .. }) => None,
            Err(e) => return Err(e),
        };
        let better = candidate.and_then(|c| match assembly_energy(&c) {
            Ok(e) if e < energy => Some((c, e)),
            _ => None,
        });
        match better {
            Some((c, e)) => {
                charges = c;
                energy = e;
                grad = energy_gradient(&charges)?;
                accepted += 1;
                trace.energies.push(energy);
                trace.max_grads.push(projected_max(domain, charges.positions(), &grad));
                trace.min_boundary_distances.push(min_distance(domain, charges.positions()));
                step = (step / config.shrink).min(config.step);
            }
            None => {
                step *= config.shrink;
                if step < MIN_STEP {
                    return Err(Error::Stalled { steps: accepted, min_step: MIN_STEP });
                }
            }
        }
    }
    trace.boundary_distances = charges.positions().iter().map(|x| domain.distance_to_boundary(x)).collect();
    trace.final_positions = charges.positions().to_vec();
    Ok(trace)
}
