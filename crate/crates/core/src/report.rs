use serde::{Deserialize, Serialize};

/// Decomposition of the energy of a charge distribution, in units with unit
/// Coulomb constant.
///
/// The first four fields come from density-weighted quadrature
/// ([`crate::potential::total_energy`]); the Dirichlet fields come from the
/// gradient of the total potential ([`crate::identities::complete_energy`]).
/// Fields not computed by a given routine are zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    /// `½ ∭ ρ U_vol dV`.
    pub volume_self: f64,
    /// `½ ∬ σ U_S dS`.
    pub surface_self: f64,
    /// `½ (∭ ρ U_S dV + ∬ σ U_vol dS)`.
    pub mutual: f64,
    /// `volume_self + surface_self + mutual`.
    pub total: f64,
    /// `∭_Ω |∇U|² dV`.
    pub dirichlet_interior: f64,
    /// `∭_ext(Ω) |∇U|² dV`, grid part plus `exterior_tail`.
    pub dirichlet_exterior: f64,
    /// Monopole estimate of the exterior integral beyond the grid box.
    pub exterior_tail: f64,
    /// `(dirichlet_interior + dirichlet_exterior) / 8π`.
    pub complete_energy: f64,
}

impl EnergyReport {
    /// Relative gap between the density-weighted and Dirichlet forms.
    pub fn chain_gap(&self) -> f64 {
        (self.total - self.complete_energy).abs() / self.complete_energy.abs().max(f64::MIN_POSITIVE)
    }
}
