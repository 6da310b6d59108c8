//! JSON run configuration.
//!
//! Only `params` is required. Defaults: `theta` = beta, `mesh.levels` = 10,
//! `mesh.grading_ratio` = 0.5, `solver.tol_rel` = 1e-8,
//! `solver.restarts` = 4, `output` = `ncusp-out`.

use std::path::{Path, PathBuf};

use ncusp::embedding_lab::{default_eps_grid, Cutoff};
use ncusp::geometry::RawParams;
use ncusp::steklov::SolverOptions;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: RawParams,
    #[serde(default)]
    pub mesh: MeshConfig,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub scaling: ScalingConfig,
    #[serde(default)]
    pub solve: SolveConfig,
}

fn default_output() -> PathBuf {
    PathBuf::from("ncusp-out")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeshConfig {
    pub levels: usize,
    pub grading_ratio: f64,
}

impl Default for MeshConfig {
    fn default() -> Self {
        MeshConfig {
            levels: 10,
            grading_ratio: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    /// Quasi-random points per Jacobian check.
    pub samples: usize,
    /// Map parameter `a`; `a_max` when absent.
    pub map_parameter: Option<f64>,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            samples: 10_000,
            map_parameter: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalingConfig {
    pub eps_grid: Vec<f64>,
    /// Weight exponents for the sharpness table; skipped when empty.
    pub theta_grid: Vec<f64>,
    pub cutoff: Cutoff,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        ScalingConfig {
            eps_grid: default_eps_grid(),
            theta_grid: Vec::new(),
            cutoff: Cutoff::Cubic,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveConfig {
    /// Also solve on the simplex with the same mesh settings and compare the
    /// trace constants.
    pub compare_simplex: bool,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let c: RunConfig = serde_json::from_str(r#"{"params": {"n": 2, "p": 1.5, "gamma": 3, "q": 2}}"#).unwrap();
        assert_eq!(c.mesh.levels, 10);
        assert_eq!(c.mesh.grading_ratio, 0.5);
        assert_eq!(c.solver.tol_rel, 1e-8);
        assert_eq!(c.solver.restarts, 4);
        assert_eq!(c.params.theta, None);
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn unknown_keys_rejected() {
        let bad = r#"{"params": {"n": 2, "p": 1.5, "gamma": 3, "q": 2}, "mesh": {"level": 4}}"#;
        assert!(serde_json::from_str::<RunConfig>(bad).is_err());
        let bad = r#"{"params": {"n": 2, "p": 1.5, "gamma": 3, "q": 2, "beta": 1}}"#;
        assert!(serde_json::from_str::<RunConfig>(bad).is_err());
    }
}
