//! JSON run configuration. Every field is optional; command defaults fill
//! the gaps and command-line flags override both.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use dirichlet_core::variational::Preconditioner;
use dirichlet_core::{Domain, Vec3};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Output subdirectory name; `default` if absent.
    pub name: Option<String>,
    pub domain: Option<Domain>,
    pub h: Option<f64>,
    pub padding: Option<f64>,
    /// Minimum number of surface panels.
    pub panels: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub solve: SolveSection,
    pub energy: EnergySection,
    pub verify: VerifySection,
    pub recover: RecoverSection,
    pub relax: RelaxSection,
}

/// Boundary data for `solve`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundarySpec {
    /// `a·x + c`.
    Linear {
        #[serde(default = "unit_x")]
        a: [f64; 3],
        #[serde(default)]
        c: f64,
    },
    /// `x² − y²`.
    QuadraticHarmonic,
    /// `q / |x − pole|`; the pole must lie outside the grid box.
    ExternalPole {
        pole: [f64; 3],
        #[serde(default = "one")]
        q: f64,
    },
    /// `x,y,z,value` rows, one per boundary node.
    Csv { path: PathBuf },
}

fn unit_x() -> [f64; 3] {
    [1.0, 0.0, 0.0]
}

fn one() -> f64 {
    1.0
}

impl Default for BoundarySpec {
    fn default() -> Self {
        BoundarySpec::Linear { a: unit_x(), c: 0.0 }
    }
}

pub type Exact = Box<dyn Fn(&Vec3) -> f64>;

impl BoundarySpec {
    /// The analytic harmonic function, when there is one.
    pub fn exact(&self) -> Option<Exact> {
        match *self {
            BoundarySpec::Linear { a, c } => Some(Box::new(move |p: &Vec3| a[0] * p.x + a[1] * p.y + a[2] * p.z + c)),
            BoundarySpec::QuadraticHarmonic => Some(Box::new(|p: &Vec3| p.x * p.x - p.y * p.y)),
            BoundarySpec::ExternalPole { pole, q } => {
                let pole = Vec3::from(pole);
                Some(Box::new(move |p: &Vec3| q / (p - pole).norm()))
            }
            BoundarySpec::Csv { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveSection {
    pub boundary: BoundarySpec,
    pub max_iter: Option<usize>,
    pub preconditioner: Preconditioner,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum VolumeDensitySpec {
    Zero,
    /// Constant `value` on a ball.
    UniformBall {
        #[serde(default)]
        center: [f64; 3],
        radius: f64,
        #[serde(default = "one")]
        value: f64,
    },
    /// `x,y,z,value` rows covering the grid.
    Csv { path: PathBuf },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceDensitySpec {
    Zero,
    Uniform {
        #[serde(default = "one")]
        value: f64,
    },
    /// Panel CSV with a `value` column; replaces the generated mesh.
    Csv { path: PathBuf },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnergySection {
    pub rho: VolumeDensitySpec,
    pub sigma: SurfaceDensitySpec,
    /// Also evaluate the total potential on the grid and its Dirichlet form.
    pub dirichlet: bool,
}

impl Default for EnergySection {
    fn default() -> Self {
        EnergySection { rho: VolumeDensitySpec::Zero, sigma: SurfaceDensitySpec::Uniform { value: 1.0 }, dirichlet: true }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySection {
    pub green_tol: f64,
    pub mutual_tol: f64,
    pub chain_tol: f64,
    pub volume_tol: f64,
    pub surface_tol: f64,
    /// Optional potential (`x,y,z,value` on the configured grid) to run the
    /// identity checks on as well.
    pub field: Option<PathBuf>,
}

impl Default for VerifySection {
    fn default() -> Self {
        VerifySection {
            green_tol: 0.02,
            mutual_tol: 0.02,
            chain_tol: 0.05,
            volume_tol: 1e-10,
            surface_tol: 0.02,
            field: None,
        }
    }
}

impl VerifySection {
    pub fn override_all(&mut self, tol: f64) {
        self.green_tol = tol;
        self.mutual_tol = tol;
        self.chain_tol = tol;
        self.volume_tol = tol;
        self.surface_tol = tol;
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    /// Potential of a uniform density `sigma` on the boundary of a ball domain.
    UniformSphere {
        #[serde(default = "one")]
        sigma: f64,
    },
    /// `x,y,z,value` rows covering the grid.
    Csv { path: PathBuf },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RecoverSection {
    pub potential: PotentialSpec,
    /// Probe offset; `2h` if absent.
    pub delta: Option<f64>,
}

impl Default for RecoverSection {
    fn default() -> Self {
        RecoverSection { potential: PotentialSpec::UniformSphere { sigma: 1.0 }, delta: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RelaxSection {
    /// `x,y,z,m` rows; otherwise `n` charges of `mass` at seeded random
    /// positions within `init_radius` of the domain centre (relative size).
    pub charges: Option<PathBuf>,
    pub n: usize,
    pub mass: f64,
    pub init_radius: f64,
    pub step: f64,
    pub shrink: f64,
    pub max_steps: usize,
    pub boundary_tol: f64,
    pub grad_tol: f64,
}

impl Default for RelaxSection {
    fn default() -> Self {
        RelaxSection {
            charges: None,
            n: 3,
            mass: 1.0,
            init_radius: 0.5,
            step: 0.1,
            shrink: 0.5,
            max_steps: 20_000,
            boundary_tol: 1e-6,
            grad_tol: 1e-6,
        }
    }
}

/// Flag values that override the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub h: Option<f64>,
    pub panels: Option<usize>,
    pub tol: Option<f64>,
}

impl RunConfig {
    pub fn load(path: Option<&std::path::Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Invalid(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("config {}: {e}", path.display())))
    }

    pub fn apply(&mut self, o: &Overrides) {
        if o.seed.is_some() {
            self.seed = o.seed;
        }
        if o.h.is_some() {
            self.h = o.h;
        }
        if o.panels.is_some() {
            self.panels = o.panels;
        }
        if o.tol.is_some() {
            self.tol = o.tol;
        }
    }

    pub fn name(&self) -> CliResult<String> {
        let name = self.name.clone().unwrap_or_else(|| "default".into());
        if name.is_empty() || name.contains(['/', '\\']) || name == "." || name == ".." {
            return Err(CliError::Invalid(format!("run name {name:?} is not a plain directory name")));
        }
        Ok(name)
    }
}

pub fn positive(name: &str, v: f64) -> CliResult<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

pub fn nonnegative(name: &str, v: f64) -> CliResult<f64> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Invalid(format!("{name} must be nonnegative and finite, got {v}")))
    }
}
