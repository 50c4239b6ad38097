//! TOML run configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::{SensorLayout, SurfaceFilm};
use crate::homogenization::BcKind;
use crate::identify::ParameterPrior;
use crate::material::config::MaterialConfig;
use crate::mesh::{generate_puc, generate_wall_sample, Mesh, PucSpec, WallSpec};

/// Geometry to generate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MeshSpec {
    Puc(PucSpec),
    Wall(WallSpec),
}

impl MeshSpec {
    pub fn generate(&self) -> Result<Mesh> {
        match self {
            MeshSpec::Puc(s) => generate_puc(s),
            MeshSpec::Wall(s) => generate_wall_sample(s),
        }
    }
}

/// Spec file of the `mesh` command.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshFile {
    pub mesh: MeshSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Laboratory {
    Experiment1,
    Experiment2,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    /// Climate CSV; overrides `experiment`.
    pub climate: Option<PathBuf>,
    #[serde(default = "default_experiment")]
    pub experiment: Laboratory,
    #[serde(default = "default_hours")]
    pub hours: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_output")]
    pub output_interval: f64,
    pub film: Option<SurfaceFilm>,
    /// Required unless the mesh is a generated wall.
    pub sensors: Option<SensorLayout>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            climate: None,
            experiment: Laboratory::Experiment1,
            hours: default_hours(),
            dt: default_dt(),
            output_interval: default_output(),
            film: None,
            sensors: None,
        }
    }
}

fn default_experiment() -> Laboratory {
    Laboratory::Experiment1
}
fn default_hours() -> f64 {
    24.0
}
fn default_dt() -> f64 {
    600.0
}
fn default_output() -> f64 {
    3600.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomogenizeConfig {
    #[serde(default = "default_theta0")]
    pub theta0: f64,
    #[serde(default = "default_phi0")]
    pub phi0: f64,
    #[serde(default = "default_grad_theta")]
    pub grad_theta: [f64; 2],
    #[serde(default)]
    pub grad_phi: [f64; 2],
    /// Reference point; the cell centre when omitted.
    pub x0: Option<[f64; 2]>,
    #[serde(default)]
    pub bc: BcKind,
}

impl Default for HomogenizeConfig {
    fn default() -> Self {
        Self {
            theta0: default_theta0(),
            phi0: default_phi0(),
            grad_theta: default_grad_theta(),
            grad_phi: [0.0; 2],
            x0: None,
            bc: BcKind::Dirichlet,
        }
    }
}

fn default_theta0() -> f64 {
    20.0
}
fn default_phi0() -> f64 {
    0.5
}
fn default_grad_theta() -> [f64; 2] {
    [10.0, 0.0]
}

/// Full-factorial grid: load cases × interface sets.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_theta0s")]
    pub theta0: Vec<f64>,
    #[serde(default = "default_phi0s")]
    pub phi0: Vec<f64>,
    #[serde(default = "default_grad_thetas")]
    pub grad_theta: Vec<[f64; 2]>,
    #[serde(default = "default_grad_phis")]
    pub grad_phi: Vec<[f64; 2]>,
    /// Interface grid; the material values when empty.
    #[serde(default)]
    pub alpha_int: Vec<f64>,
    #[serde(default)]
    pub beta_int: Vec<f64>,
    /// Adds a perfect-contact column to the interface grid.
    #[serde(default)]
    pub include_perfect: bool,
    #[serde(default)]
    pub bc: BcKind,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            theta0: default_theta0s(),
            phi0: default_phi0s(),
            grad_theta: default_grad_thetas(),
            grad_phi: default_grad_phis(),
            alpha_int: Vec::new(),
            beta_int: Vec::new(),
            include_perfect: false,
            bc: BcKind::Dirichlet,
        }
    }
}

fn default_theta0s() -> Vec<f64> {
    vec![20.0]
}
fn default_phi0s() -> Vec<f64> {
    vec![0.5]
}
fn default_grad_thetas() -> Vec<[f64; 2]> {
    vec![[10.0, 0.0]]
}
fn default_grad_phis() -> Vec<[f64; 2]> {
    vec![[0.0, 0.0]]
}

/// One identification stage.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageConfig {
    pub experiment: Laboratory,
    /// Dotted parameter names, e.g. `mortar.lambda0`.
    pub parameters: Vec<String>,
    /// Explicit priors; otherwise centred on the material values.
    #[serde(default)]
    pub priors: Vec<ParameterPrior>,
    /// Observed traces CSV; synthetic traces from the material when omitted.
    pub observed: Option<PathBuf>,
    #[serde(default = "default_hours")]
    pub hours: f64,
    #[serde(default = "default_stage_dt")]
    pub dt: f64,
}

fn default_stage_dt() -> f64 {
    3600.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentifyConfig {
    #[serde(default = "default_pool")]
    pub pool: usize,
    #[serde(default = "default_top_k")]
    pub top_k: usize,
    /// Coefficient of variation of generated priors.
    #[serde(default = "default_cov")]
    pub cov: f64,
    /// Generated priors are centred at `prior_shift ×` the material value.
    #[serde(default = "default_shift")]
    pub prior_shift: f64,
    /// Forces the material values into synthetic pools as realization 0.
    #[serde(default = "default_true")]
    pub anchor_truth: bool,
    /// Thermal then moisture when empty.
    #[serde(default)]
    pub stages: Vec<StageConfig>,
}

impl Default for IdentifyConfig {
    fn default() -> Self {
        Self {
            pool: default_pool(),
            top_k: default_top_k(),
            cov: default_cov(),
            prior_shift: default_shift(),
            anchor_truth: true,
            stages: Vec::new(),
        }
    }
}

fn default_pool() -> usize {
    50
}
fn default_top_k() -> usize {
    5
}
fn default_cov() -> f64 {
    crate::identify::DEFAULT_COV
}
fn default_shift() -> f64 {
    1.0
}
fn default_true() -> bool {
    true
}

/// Configuration of the `solve`, `homogenize`, `sweep` and `identify` commands.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    /// Mesh file; relative paths resolve against the config directory.
    pub mesh_file: Option<PathBuf>,
    pub mesh: Option<MeshSpec>,
    #[serde(default)]
    pub material: MaterialConfig,
    pub solve: Option<SolveConfig>,
    pub homogenize: Option<HomogenizeConfig>,
    pub sweep: Option<SweepConfig>,
    pub identify: Option<IdentifyConfig>,
}

pub fn parse_toml<T: serde::de::DeserializeOwned>(text: &str, origin: &Path) -> Result<T> {
    toml::from_str(text).map_err(|e| Error::Config(format!("{}: {e}", origin.display())))
}

pub fn read_toml<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_toml(&text, path)
}

/// `p` relative to `base` unless absolute.
pub fn resolve_path(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mesh_spec_is_tagged_and_strict() {
        let f: MeshFile = toml::from_str("[mesh]\nkind = \"puc\"\nbrick_length = 0.2\n").unwrap();
        match f.mesh {
            MeshSpec::Puc(s) => {
                assert_eq!(s.brick_length, 0.2);
                assert_eq!(s.head_joint, PucSpec::default().head_joint);
            }
            _ => panic!("wrong kind"),
        }
        assert!(toml::from_str::<MeshFile>("[mesh]\nkind = \"puc\"\nbrick_lenght = 0.2\n").is_err());
        assert!(toml::from_str::<MeshFile>("[mesh]\nkind = \"arch\"\n").is_err());
    }

    #[test]
    fn empty_run_config_uses_defaults() {
        let c: RunConfig = toml::from_str("").unwrap();
        assert!(c.mesh.is_none() && c.solve.is_none());
        let c: RunConfig = toml::from_str("[sweep]\nphi0 = [0.3, 0.8]\n[material.brick]\nlambda0 = 0.3\n").unwrap();
        assert_eq!(c.sweep.unwrap().phi0, vec![0.3, 0.8]);
        assert_eq!(c.material.resolve().unwrap().model.get("brick.lambda0").unwrap(), 0.3);
    }
}
