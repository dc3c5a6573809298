//! TOML run configuration.
//!
//! ```toml
//! [problem]
//! runs = 4
//! horizon = 1.0            # profile functions live on [0, horizon]
//!
//! [[problem.profile]]
//! basis = "step"           # or "bspline1"
//! size = 2                 # number of x-basis functions
//! beta_degree = 1          # power basis for β(t)
//! bounds = [-1.0, 1.0]
//!
//! [[problem.scalar]]
//! bounds = [-1.0, 1.0]
//! effects = "main"         # or "main+quadratic"
//! levels = 3               # optional: restrict to equally spaced levels
//!
//! [optimizer]
//! starts = 100
//! seed = 1
//! grid = 21
//! max_sweeps = 50
//! improvement_tol = 1e-10
//! refine = true
//! workers = 0
//!
//! [output]
//! dir = "out"
//! sample_points = 501
//! reference_value = 8.404  # optional
//!
//! [sweep]                  # only read by `sweep`
//! runs = [4, 8, 12]
//! sizes = [2, 3, 4, 8, 16]
//! factor = 1
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::basis::BasisSystem;
use crate::error::{Error, Result};
use crate::model::{Bounds, EffectModel, ProblemSpec, ProfileFactorSpec, ScalarFactorSpec};
use crate::optimizer::OptimizerConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum XBasisKind {
    Step,
    Bspline1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Effects {
    #[serde(rename = "main")]
    Main,
    #[serde(rename = "main+quadratic")]
    MainQuadratic,
}

fn default_bounds() -> [f64; 2] {
    [-1.0, 1.0]
}

fn default_horizon() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub basis: XBasisKind,
    pub size: usize,
    pub beta_degree: usize,
    #[serde(default = "default_bounds")]
    pub bounds: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarConfig {
    #[serde(default = "default_bounds")]
    pub bounds: [f64; 2],
    pub effects: Effects,
    #[serde(default)]
    pub levels: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub runs: usize,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default)]
    pub profile: Vec<ProfileConfig>,
    #[serde(default)]
    pub scalar: Vec<ScalarConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerSection {
    pub starts: usize,
    pub seed: u64,
    pub grid: usize,
    pub max_sweeps: usize,
    pub improvement_tol: f64,
    pub refine: bool,
    pub workers: usize,
}

impl Default for OptimizerSection {
    fn default() -> Self {
        let d = OptimizerConfig::default();
        Self {
            starts: d.n_starts,
            seed: d.seed,
            grid: d.candidate_grid_size,
            max_sweeps: d.max_sweeps,
            improvement_tol: d.improvement_tol,
            refine: d.refine,
            workers: d.workers,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub sample_points: usize,
    pub reference_value: Option<f64>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            sample_points: 501,
            reference_value: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub runs: Vec<usize>,
    pub sizes: Vec<usize>,
    /// 1-based profile factor whose basis size is varied.
    #[serde(default = "one")]
    pub factor: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    #[serde(default)]
    pub optimizer: OptimizerSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
}

fn bounds(b: [f64; 2]) -> Result<Bounds> {
    Bounds::new(b[0], b[1])
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    fn check(&self) -> Result<()> {
        if self.output.sample_points < 2 {
            return Err(Error::Config("sample_points must be at least 2".into()));
        }
        if let Some(r) = self.output.reference_value {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::Config(format!("reference_value must be positive, got {r}")));
            }
        }
        if let Some(s) = &self.sweep {
            if s.runs.is_empty() || s.sizes.is_empty() {
                return Err(Error::Config("sweep needs at least one run count and one size".into()));
            }
            if s.factor == 0 || s.factor > self.problem.profile.len() {
                return Err(Error::Config(format!(
                    "sweep factor {} does not name a profile factor",
                    s.factor
                )));
            }
        }
        self.problem_spec()?.validate()?;
        self.optimizer_config().validate()
    }

    pub fn problem_spec(&self) -> Result<ProblemSpec> {
        let p = &self.problem;
        if !(p.horizon > 0.0 && p.horizon.is_finite()) {
            return Err(Error::Config(format!("horizon must be positive, got {}", p.horizon)));
        }
        let profile = p
            .profile
            .iter()
            .map(|f| {
                let x = match f.basis {
                    XBasisKind::Step => BasisSystem::uniform_step(0.0, p.horizon, f.size)?,
                    XBasisKind::Bspline1 => BasisSystem::uniform_bspline1(0.0, p.horizon, f.size)?,
                };
                let beta = BasisSystem::power(f.beta_degree, 0.0, p.horizon)?;
                ProfileFactorSpec::new(x, beta, bounds(f.bounds)?)
            })
            .collect::<Result<Vec<_>>>()?;
        let scalar = p
            .scalar
            .iter()
            .map(|s| {
                let effect = match s.effects {
                    Effects::Main => EffectModel::MainOnly,
                    Effects::MainQuadratic => EffectModel::MainPlusQuadratic,
                };
                Ok(ScalarFactorSpec {
                    bounds: bounds(s.bounds)?,
                    effect,
                    levels: s.levels,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ProblemSpec::new(p.runs, profile, scalar))
    }

    pub fn optimizer_config(&self) -> OptimizerConfig {
        let o = &self.optimizer;
        OptimizerConfig {
            n_starts: o.starts,
            seed: o.seed,
            candidate_grid_size: o.grid,
            max_sweeps: o.max_sweeps,
            improvement_tol: o.improvement_tol,
            refine: o.refine,
            workers: o.workers,
        }
    }
}
