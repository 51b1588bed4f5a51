//! Point-charge formulas: Coulomb force, assembly energy and the potential
//! felt by a unit test charge.
//!
//! Masses are signed; with unit Coulomb constant the pair energy is
//! `m_i m_j / r_ij` and the total counts every unordered pair once.

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Vec3};

/// Finite set of point charges with pairwise distinct positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChargeSet {
    positions: Vec<Vec3>,
    masses: Vec<f64>,
}

impl ChargeSet {
    pub fn new(positions: Vec<Vec3>, masses: Vec<f64>) -> Result<Self> {
        if positions.len() != masses.len() {
            return Err(Error::LengthMismatch { what: "charge masses", expected: positions.len(), actual: masses.len() });
        }
        if let Some(index) = positions.iter().position(|p| p.iter().any(|v| !v.is_finite())) {
            return Err(Error::NonFinite { what: "charge position", index });
        }
        if let Some(index) = masses.iter().position(|m| !m.is_finite()) {
            return Err(Error::NonFinite { what: "charge mass", index });
        }
        for i in 0..positions.len() {
            for j in 0..i {
                if positions[i] == positions[j] {
                    return Err(Error::ZeroDistance { charge: i });
                }
            }
        }
        Ok(ChargeSet { positions, masses })
    }

    /// `n` charges of equal mass.
    pub fn uniform(positions: Vec<Vec3>, mass: f64) -> Result<Self> {
        let n = positions.len();
        ChargeSet::new(positions, vec![mass; n])
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// Same masses at new positions.
    pub fn with_positions(&self, positions: Vec<Vec3>) -> Result<Self> {
        ChargeSet::new(positions, self.masses.clone())
    }

    /// The set with charge `i` removed.
    pub fn without(&self, i: usize) -> ChargeSet {
        let mut positions = self.positions.clone();
        let mut masses = self.masses.clone();
        positions.remove(i);
        masses.remove(i);
        ChargeSet { positions, masses }
    }

    /// Disjoint union; fails if a position is shared.
    pub fn union(&self, other: &ChargeSet) -> Result<Self> {
        let positions = self.positions.iter().chain(&other.positions).copied().collect();
        let masses = self.masses.iter().chain(&other.masses).copied().collect();
        ChargeSet::new(positions, masses)
    }
}

/// `|F| = m1 m2 / r^2`.
pub fn coulomb_force_magnitude(m1: f64, m2: f64, r: f64) -> Result<f64> {
    if r == 0.0 {
        return Err(Error::ZeroDistance { charge: 0 });
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::invalid("r", format!("distance must be positive, got {r}")));
    }
    Ok(m1 * m2 / (r * r))
}

/// Work done assembling the charges one at a time from infinity: charge `j`
/// is brought in against the field of charges `0..j`.
pub fn assembly_energy(charges: &ChargeSet) -> Result<f64> {
    let p = &charges.positions;
    let m = &charges.masses;
    let mut total = 0.0;
    for j in 1..p.len() {
        let mut work = 0.0;
        for i in 0..j {
            let r = (p[j] - p[i]).norm();
            if r == 0.0 {
                return Err(Error::ZeroDistance { charge: j });
            }
            work += m[i] / r;
        }
        total += m[j] * work;
    }
    Ok(total)
}

/// Potential at `x` of all charges: the work to bring a unit charge there.
pub fn point_potential(charges: &ChargeSet, x: &Vec3) -> Result<f64> {
    let mut u = 0.0;
    for (i, (p, m)) in charges.positions.iter().zip(&charges.masses).enumerate() {
        let r = (x - p).norm();
        if r == 0.0 {
            return Err(Error::ZeroDistance { charge: i });
        }
        u += m / r;
    }
    Ok(u)
}

/// `½ Σ_i m_i U(P_i)` where `U(P_i)` is the potential of the other charges.
pub fn assembly_energy_via_potentials(charges: &ChargeSet) -> Result<f64> {
    let mut acc = 0.0;
    for i in 0..charges.len() {
        let others = charges.without(i);
        acc += charges.masses[i] * point_potential(&others, &charges.positions[i])?;
    }
    Ok(0.5 * acc)
}
